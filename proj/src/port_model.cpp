#include "clusterfeed/port_model.hpp"

#include <cmath>
#include <sstream>

#include "clusterfeed/errors.hpp"

namespace clusterfeed {

namespace {

void check_square(const CMat& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw ValidationError(std::string("port model: ") + what + " has the wrong shape");
  }
}

nlohmann::json complex_matrix_json(const CMat& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

CMat complex_matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string("port model: '") + what + "' must be a matrix");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMat m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != n) {
      throw ValidationError(std::string("port model: '") + what + "' must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = j[r][c];
      if (e.is_number()) m(r, c) = e.get<double>();
      else m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

}  // namespace

PortModel PortModel::from_network(double frequency, CMat y0, CMat g0, RMat b0, const RVec& reference_impedance) {
  const Eigen::Index n = y0.rows();
  check_square(y0, n, "y0");
  check_square(g0, n, "g0");
  if (b0.rows() != n || b0.cols() != n) throw ValidationError("port model: b0 has the wrong shape");
  if (reference_impedance.size() != n) throw ValidationError("port model: one reference impedance per port");
  if ((reference_impedance.array() <= 0.0).any()) {
    throw ValidationError("port model: reference impedances must be positive");
  }
  const double scale = std::max(g0.norm(), 1e-300);
  if ((g0 - g0.adjoint()).norm() > 1e-8 * scale) throw ValidationError("port model: g0 is not hermitian");

  PortModel pm;
  pm.frequency = frequency;
  pm.y0 = std::move(y0);
  pm.g0 = hermitian_part(g0);
  pm.b0 = 0.5 * (b0 + b0.transpose());
  pm.lambda = reference_impedance.array().sqrt();
  const CMat lam = pm.lambda.cast<cplx>().asDiagonal();
  const CMat lam_inv = pm.lambda.cwiseInverse().cast<cplx>().asDiagonal();
  pm.k = 0.5 * (lam_inv + lam * pm.y0);
  return pm;
}

PortModel reduce_to_ports(const MomOperator& mom, const WireScene& scene, const PortReductionOptions& options) {
  if (!(options.zeta > 0.0)) throw DomainError("reduce_to_ports: zeta must be positive");
  const CMat excite = excitation_matrix(scene, options.zeta);
  Eigen::PartialPivLU<CMat> lu(mom.z);
  if (!(lu.rcond() > 1e-14)) {
    std::ostringstream msg;
    msg << "impedance matrix is singular at " << mom.frequency << " Hz (internal resonance?)";
    throw SingularSystemError(msg.str());
  }
  const CMat w = lu.solve(excite);  // basis currents per unit port voltage, Y D P
  CMat y0 = excite.transpose() * w;
  y0 = 0.5 * (y0 + y0.transpose());

  CMat g0;
  if (options.source == RadiationSource::kFarField) {
    const RMat rff = radiation_matrix_farfield_converged(mom, options.quadrature);
    g0 = w.adjoint() * rff.cast<cplx>() * w;
  } else {
    g0 = w.adjoint() * mom.resistance().cast<cplx>() * w;
  }
  const CMat b0c = w.adjoint() * mom.reactance().cast<cplx>() * w;
  const RMat b0 = hermitian_part(b0c).real();

  RVec z0(scene.port_count());
  for (int i = 0; i < scene.port_count(); ++i) {
    z0(i) = scene.reference_impedance()[i] / (options.zeta * options.zeta);
  }
  return PortModel::from_network(mom.frequency, std::move(y0), hermitian_part(g0), b0, z0);
}

double incident_power(const PortModel& pm, const CVec& v) {
  if (v.size() != pm.ports()) throw DomainError("incident_power: dimension mismatch");
  return 0.5 * (pm.k * v).squaredNorm();
}

double radiated_power(const PortModel& pm, const CVec& v) {
  if (v.size() != pm.ports()) throw DomainError("radiated_power: dimension mismatch");
  return 0.5 * quadratic_form(pm.g0, v);
}

double reactive_power(const PortModel& pm, const CVec& v) {
  if (v.size() != pm.ports()) throw DomainError("reactive_power: dimension mismatch");
  return 0.5 * v.dot(pm.b0.cast<cplx>() * v).real();
}

double total_efficiency(const PortModel& pm, const CVec& v) {
  if (v.size() != pm.ports()) throw DomainError("total_efficiency: dimension mismatch");
  const double denom = (pm.k * v).squaredNorm();
  if (!(denom > 0.0) || v.squaredNorm() == 0.0) {
    throw DomainError("total_efficiency: undefined for a zero feeding vector");
  }
  return quadratic_form(pm.g0, v) / denom;
}

nlohmann::json port_model_to_json(const PortModel& pm) {
  nlohmann::json j;
  j["frequency"] = pm.frequency;
  const RVec z0 = pm.reference_impedance();
  j["reference_impedance"] = std::vector<double>(z0.data(), z0.data() + z0.size());
  j["y0"] = complex_matrix_json(pm.y0);
  j["g0"] = complex_matrix_json(pm.g0);
  j["b0"] = complex_matrix_json(pm.b0.cast<cplx>());
  return j;
}

PortModel port_model_from_json(const nlohmann::json& j) {
  try {
    const CMat y0 = complex_matrix_from_json(j.at("y0"), "y0");
    const CMat g0 = complex_matrix_from_json(j.at("g0"), "g0");
    RMat b0 = j.contains("b0") ? RMat(complex_matrix_from_json(j.at("b0"), "b0").real()) : RMat(-y0.imag());
    const auto z = j.at("reference_impedance");
    RVec z0(y0.rows());
    if (z.is_number()) z0.setConstant(z.get<double>());
    else {
      const auto zv = z.get<std::vector<double>>();
      if (static_cast<Eigen::Index>(zv.size()) != y0.rows()) {
        throw ValidationError("port model: one reference impedance per port");
      }
      for (Eigen::Index i = 0; i < z0.size(); ++i) z0(i) = zv[i];
    }
    return PortModel::from_network(j.at("frequency").get<double>(), y0, g0, b0, z0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid port model: ") + e.what());
  }
}

}  // namespace clusterfeed
