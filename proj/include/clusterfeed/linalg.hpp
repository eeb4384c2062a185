#pragma once

#include <complex>

#include <Eigen/Dense>

namespace clusterfeed {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kMu0 = 1.25663706212e-6;
inline constexpr double kEps0 = 1.0 / (kMu0 * kSpeedOfLight * kSpeedOfLight);
inline constexpr double kFreeSpaceImpedance = kMu0 * kSpeedOfLight;

/// Result of the hermitian pencil A x = lambda B x restricted to range(B).
struct PencilEigen {
  RVec values;     // ascending
  CMat vectors;    // columns satisfy x^H B x = 1
  Eigen::Index deflated = 0;  // directions of B dropped below the floor
};

/// Solves the pencil on the span of eigenvectors of B whose eigenvalues exceed
/// rel_floor * lambda_max(B). B must be hermitian PSD.
PencilEigen hermitian_pencil(const CMat& a, const CMat& b, double rel_floor = 1e-12);

/// Basis T (N x r) with T^H B T = I_r spanning the numerically positive part of B.
CMat whitening_basis(const CMat& b, double rel_floor = 1e-12, Eigen::Index* deflated = nullptr);

CMat hermitian_part(const CMat& m);

double min_hermitian_eigenvalue(const CMat& m);

/// Real part of v^H M v for hermitian M.
inline double quadratic_form(const CMat& m, const CVec& v) { return v.dot(m * v).real(); }

/// Real symmetric 2N x 2N matrix with x^T R x = v^H M v for x = [Re v; Im v].
RMat realify(const CMat& m);
RVec realify(const CVec& v);
CVec complexify(const RVec& x);

}  // namespace clusterfeed
