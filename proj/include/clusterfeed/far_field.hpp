#pragma once

#include "clusterfeed/linalg.hpp"
#include "clusterfeed/mom.hpp"

namespace clusterfeed {

/// Radiation-zone field with the exp(-jkr)/r factor removed, in volts.
/// Radiated power is (1 / 2 Z0) times the integral of |F|^2 over the sphere.
struct FarField {
  cplx theta;
  cplx phi;

  double intensity() const { return std::norm(theta) + std::norm(phi); }
};

FarField far_field(const MomOperator& mom, const CVec& current, double theta, double phi);

struct AngularQuadrature {
  int theta_order = 32;  // Gauss-Legendre in cos(theta)
  int phi_order = 64;    // uniform in phi
};

/// Smallest Gauss order in cos(theta) that resolves the scene's far-field harmonics.
int minimum_theta_order(const MomOperator& mom);

/// R_ff with (1/2) I^H R_ff I equal to the radiated power. Throws QuadratureError
/// when the rule is too coarse for the electrical size or R_ff fails the PSD floor.
RMat radiation_matrix_farfield(const MomOperator& mom, const AngularQuadrature& quadrature = {});

/// Doubles the rule until successive matrices agree to rel_change (at most max_doublings).
RMat radiation_matrix_farfield_converged(const MomOperator& mom, AngularQuadrature quadrature = {},
                                         double rel_change = 1e-6, int max_doublings = 3);

}  // namespace clusterfeed
