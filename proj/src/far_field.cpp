#include "clusterfeed/far_field.hpp"

#include <cmath>
#include <sstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/quadrature.hpp"

namespace clusterfeed {

namespace {

// h0 = int_0^1 exp(jxt) dt, h1 = int_0^1 t exp(jxt) dt
std::pair<cplx, cplx> phase_moments(double x) {
  const cplx jx(0.0, x);
  if (std::abs(x) < 0.5) {
    cplx term = 1.0;  // (jx)^n / n!
    cplx h0 = 0.0;
    cplx h1 = 0.0;
    for (int n = 0; n < 24; ++n) {
      h0 += term / static_cast<double>(n + 1);
      h1 += term / static_cast<double>(n + 2);
      term *= jx / static_cast<double>(n + 1);
    }
    return {h0, h1};
  }
  const cplx e = std::exp(jx);
  return {(e - 1.0) / jx, e / jx + (e - 1.0) / (x * x)};
}

struct Direction {
  Eigen::Vector3d s;
  Eigen::Vector3d theta_hat;
  Eigen::Vector3d phi_hat;
};

Direction direction(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  return {{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

// Radiation vector int f_b(r) exp(jk s.r) dl of every basis function; returns
// the theta and phi projections scaled to field units.
void basis_patterns(const MomOperator& mom, const Direction& d, Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> f_theta,
                    Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> f_phi) {
  const double k = mom.wavenumber;
  const cplx scale = cplx(0.0, -k * kFreeSpaceImpedance / (4.0 * kPi));
  const std::size_t ns = mom.segments.size();
  // per-segment rising and falling shape integrals
  std::vector<cplx> rise(ns), fall(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const Segment& seg = mom.segments[i];
    const double u = k * d.s.dot(seg.direction) * seg.length;
    const auto [h0, h1] = phase_moments(u);
    const cplx base = std::exp(cplx(0.0, k * d.s.dot(seg.start))) * seg.length;
    rise[i] = base * h1;
    fall[i] = base * (h0 - h1);
  }
  for (std::size_t b = 0; b < mom.basis.size(); ++b) {
    const TriangleBasis& tb = mom.basis[b];
    const Eigen::Vector3cd n = mom.segments[tb.rising].direction.cast<cplx>() * rise[tb.rising] +
                               mom.segments[tb.falling].direction.cast<cplx>() * fall[tb.falling];
    f_theta(b) = scale * d.theta_hat.cast<cplx>().dot(n);
    f_phi(b) = scale * d.phi_hat.cast<cplx>().dot(n);
  }
}

}  // namespace

FarField far_field(const MomOperator& mom, const CVec& current, double theta, double phi) {
  const auto nb = static_cast<Eigen::Index>(mom.basis.size());
  if (current.size() != nb) throw DomainError("far_field: current vector has the wrong size");
  Eigen::RowVectorXcd ft(nb), fp(nb);
  basis_patterns(mom, direction(theta, phi), ft, fp);
  return {(ft * current)(0), (fp * current)(0)};
}

int minimum_theta_order(const MomOperator& mom) {
  double rmax = 0.0;
  for (const Segment& s : mom.segments) {
    rmax = std::max({rmax, s.start.norm(), (s.start + s.length * s.direction).norm()});
  }
  return static_cast<int>(std::ceil(mom.wavenumber * rmax)) + 8;
}

RMat radiation_matrix_farfield(const MomOperator& mom, const AngularQuadrature& quadrature) {
  const int need = minimum_theta_order(mom);
  if (quadrature.theta_order < need || quadrature.phi_order < 2 * need) {
    std::ostringstream msg;
    msg << "angular quadrature " << quadrature.theta_order << "x" << quadrature.phi_order
        << " is too coarse for this scene; use at least " << need << "x" << 2 * need;
    throw QuadratureError(msg.str());
  }
  const GaussRule rule = gauss_legendre(quadrature.theta_order);
  const int nphi = quadrature.phi_order;
  const auto nb = static_cast<Eigen::Index>(mom.basis.size());
  const Eigen::Index ndir = static_cast<Eigen::Index>(rule.nodes.size()) * nphi;
  CMat ft(ndir, nb), fp(ndir, nb);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = std::acos(rule.nodes[i]);
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * kPi * j / nphi;
      basis_patterns(mom, direction(theta, phi), ft.row(row), fp.row(row));
      const double w = std::sqrt(rule.weights[i] * 2.0 * kPi / nphi);
      ft.row(row) *= w;
      fp.row(row) *= w;
      ++row;
    }
  }
  // (1/2) I^H R I = (1 / 2 Z0) int |F|^2  =>  R = (1/Z0) int F^H F
  const CMat gram = ft.adjoint() * ft + fp.adjoint() * fp;
  RMat r = gram.real() / kFreeSpaceImpedance;
  r = 0.5 * (r + r.transpose());
  const double floor = -1e-10 * r.trace();
  Eigen::SelfAdjointEigenSolver<RMat> es(r, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < floor) {
    throw QuadratureError("far-field radiation matrix violates the PSD floor; raise the quadrature order");
  }
  return r;
}

RMat radiation_matrix_farfield_converged(const MomOperator& mom, AngularQuadrature quadrature,
                                         double rel_change, int max_doublings) {
  const int need = minimum_theta_order(mom);
  while (quadrature.theta_order < need || quadrature.phi_order < 2 * need) {
    quadrature.theta_order *= 2;
    quadrature.phi_order *= 2;
  }
  RMat current = radiation_matrix_farfield(mom, quadrature);
  for (int i = 0; i < max_doublings; ++i) {
    quadrature.theta_order *= 2;
    quadrature.phi_order *= 2;
    RMat refined = radiation_matrix_farfield(mom, quadrature);
    const double change = (refined - current).norm() / refined.norm();
    current = std::move(refined);
    if (change < rel_change) return current;
  }
  throw QuadratureError("far-field radiation matrix did not converge under quadrature doubling");
}

}  // namespace clusterfeed
