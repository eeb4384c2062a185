#pragma once

#include <json.hpp>

#include "clusterfeed/far_field.hpp"
#include "clusterfeed/linalg.hpp"
#include "clusterfeed/mom.hpp"
#include "clusterfeed/wire_scene.hpp"

namespace clusterfeed {

/// Port-level network quantities of one frequency.
///
/// The port selector P (N_b x N, boolean) maps port k to the basis function on
/// its junction; D = zeta * I converts port units to excitation units. Port
/// matrices follow from the congruence m = P^H D^H Y^H M Y D P with Y = Z^-1.
struct PortModel {
  double frequency = 0.0;
  CMat y0;     // port admittance, S
  CMat g0;     // port radiation matrix (hermitian PSD), S
  RMat b0;     // port susceptance matrix (real symmetric), S
  RVec lambda; // diag of Lambda, sqrt(ohm), Lambda_kk = sqrt(Z0_k)
  CMat k;      // a = K v with K = (Lambda^-1 + Lambda y0) / 2

  Eigen::Index ports() const { return y0.rows(); }
  RVec reference_impedance() const { return lambda.array().square(); }
  /// Q0 = K^H K, so v^H Q0 v = 2 Pin.
  CMat incident_form() const { return k.adjoint() * k; }

  /// Builds Lambda and K from network data; validates shapes and g0 hermiticity.
  static PortModel from_network(double frequency, CMat y0, CMat g0, RMat b0, const RVec& reference_impedance);
};

enum class RadiationSource { kResistance, kFarField };

struct PortReductionOptions {
  RadiationSource source = RadiationSource::kResistance;
  double zeta = 1.0;
  AngularQuadrature quadrature{};
};

PortModel reduce_to_ports(const MomOperator& mom, const WireScene& scene,
                          const PortReductionOptions& options = {});

double incident_power(const PortModel& pm, const CVec& v);
double radiated_power(const PortModel& pm, const CVec& v);
double reactive_power(const PortModel& pm, const CVec& v);

/// v^H g0 v / v^H K^H K v. Throws DomainError for v = 0.
double total_efficiency(const PortModel& pm, const CVec& v);

/// Complex entries are [re, im] pairs, SI units.
nlohmann::json port_model_to_json(const PortModel& pm);
PortModel port_model_from_json(const nlohmann::json& j);

}  // namespace clusterfeed
