#include "clusterfeed/mom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/quadrature.hpp"

namespace clusterfeed {

namespace {

// Segment-pair moments of the kernel: int int {1, s, s', s s'} G ds ds'
// with s measured from the start of the observation segment and s' from the
// start of the source segment.
struct PairMoments {
  std::array<cplx, 4> m{};  // 00, 10, 01, 11
};

struct InnerStatic {
  double j0;  // int 1 / R_a ds'
  double j1;  // int s' / R_a ds'
};

InnerStatic inner_static(const Eigen::Vector3d& r, const Segment& src, double a2) {
  const Eigen::Vector3d d = r - src.start;
  const double z0 = d.dot(src.direction);
  const double rho2 = std::max(d.squaredNorm() - z0 * z0, 0.0);
  const double b2 = rho2 + a2;
  const double b = std::sqrt(b2);
  const double len = src.length;
  const double j0 = std::asinh((len - z0) / b) + std::asinh(z0 / b);
  const double j1 = std::sqrt((len - z0) * (len - z0) + b2) - std::sqrt(z0 * z0 + b2) + z0 * j0;
  return {j0, j1};
}

// Composite Gauss-Legendre nodes on the observation segment, graded
// geometrically toward the points facing the source end points where the
// inner static integral has a log peak of width ~ radius.
std::vector<std::pair<double, double>> static_outer_rule(const Segment& obs, const Segment& src, double radius) {
  static const GaussRule panel = gauss_legendre(8);
  const double len = obs.length;
  std::vector<double> breaks{0.0, len};
  const double c = obs.direction.dot(src.direction);
  if (std::abs(c) > 1e-12) {
    const double base = (obs.start - src.start).dot(src.direction);
    for (double z : {0.0, src.length}) {
      const double s = (z - base) / c;
      if (s > 0.0 && s < len) breaks.push_back(s);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [&](double x, double y) { return y - x < 1e-9 * len; }),
               breaks.end());
  const double finest = 0.05 * radius;
  std::vector<double> edges;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double x0 = breaks[i];
    const double x1 = breaks[i + 1];
    const double mid = 0.5 * (x0 + x1);
    std::vector<double> left{x0}, right;
    for (double h = 0.15 * (mid - x0); h > finest; h *= 0.15) {
      left.push_back(x0 + h);
      right.push_back(x1 - h);
    }
    std::sort(left.begin(), left.end());
    edges.insert(edges.end(), left.begin(), left.end());
    edges.push_back(mid);
    std::sort(right.begin(), right.end());
    edges.insert(edges.end(), right.begin(), right.end());
  }
  edges.push_back(breaks.back());
  std::vector<std::pair<double, double>> rule;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double h = 0.5 * (edges[i + 1] - edges[i]);
    for (std::size_t j = 0; j < panel.nodes.size(); ++j) {
      rule.emplace_back(edges[i] + h * (panel.nodes[j] + 1.0), h * panel.weights[j]);
    }
  }
  return rule;
}

PairMoments pair_moments(const Segment& obs, const Segment& src, double k, const GaussRule& rule,
                         bool near) {
  constexpr double inv4pi = 1.0 / (4.0 * kPi);
  const double a2 = obs.radius * src.radius;
  const double hp = 0.5 * obs.length;
  const double hq = 0.5 * src.length;
  PairMoments out;
  const std::size_t n = rule.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = hp * (rule.nodes[i] + 1.0);
    const Eigen::Vector3d rp = obs.start + s * obs.direction;
    for (std::size_t j = 0; j < n; ++j) {
      const double sp = hq * (rule.nodes[j] + 1.0);
      const Eigen::Vector3d rq = src.start + sp * src.direction;
      const double r = (rp - rq).norm();
      const double ra = std::sqrt(r * r + a2);
      // radiative part uses the exact axis distance; it is smooth at r = 0
      const double gi = -(r > 1e-14 ? std::sin(k * r) / r : k) * inv4pi;
      const double gr = (near ? (std::cos(k * ra) - 1.0) : std::cos(k * ra)) / ra * inv4pi;
      const cplx g = cplx(gr, gi) * (rule.weights[i] * rule.weights[j] * hp * hq);
      out.m[0] += g;
      out.m[1] += g * s;
      out.m[2] += g * sp;
      out.m[3] += g * (s * sp);
    }
  }
  if (near) {
    for (const auto& [s, w] : static_outer_rule(obs, src, std::sqrt(a2))) {
      const InnerStatic st = inner_static(obs.start + s * obs.direction, src, a2);
      const double ww = w * inv4pi;
      out.m[0] += ww * st.j0;
      out.m[1] += ww * s * st.j0;
      out.m[2] += ww * st.j1;
      out.m[3] += ww * s * st.j1;
    }
  }
  return out;
}

struct ShapeTerm {
  int segment;
  double c0;  // value at segment start
  double c1;  // slope, also the divergence of the basis on this segment
};

std::array<ShapeTerm, 2> shape_terms(const MomOperator& mom, const TriangleBasis& b) {
  const double lr = mom.segments[b.rising].length;
  const double lf = mom.segments[b.falling].length;
  return {ShapeTerm{b.rising, 0.0, 1.0 / lr}, ShapeTerm{b.falling, 1.0, -1.0 / lf}};
}

}  // namespace

MomOperator assemble_impedance(const WireScene& scene, double frequency, const AssemblyOptions& options) {
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw DomainError("assemble_impedance: frequency must be positive");
  }
  MomOperator mom;
  mom.frequency = frequency;
  const double omega = 2.0 * kPi * frequency;
  mom.wavenumber = omega / kSpeedOfLight;
  const double k = mom.wavenumber;

  std::vector<int> first_segment;
  for (std::size_t w = 0; w < scene.wires().size(); ++w) {
    const Wire& wire = scene.wires()[w];
    first_segment.push_back(static_cast<int>(mom.segments.size()));
    for (int s = 0; s < wire.segments; ++s) {
      Segment seg;
      seg.start = scene.node(static_cast<int>(w), s);
      seg.direction = scene.direction(static_cast<int>(w));
      seg.length = scene.segment_length(static_cast<int>(w));
      seg.radius = wire.radius;
      seg.wire = static_cast<int>(w);
      mom.segments.push_back(seg);
    }
  }
  for (std::size_t w = 0; w < scene.wires().size(); ++w) {
    for (int j = 1; j < scene.wires()[w].segments; ++j) {
      mom.basis.push_back(TriangleBasis{first_segment[w] + j - 1, first_segment[w] + j});
    }
  }

  const GaussRule rule = gauss_legendre(options.gauss_order);
  const std::size_t ns = mom.segments.size();
  std::vector<PairMoments> table(ns * ns);
  for (std::size_t p = 0; p < ns; ++p) {
    for (std::size_t q = p; q < ns; ++q) {
      const Segment& sp = mom.segments[p];
      const Segment& sq = mom.segments[q];
      const Eigen::Vector3d cp = sp.start + 0.5 * sp.length * sp.direction;
      const Eigen::Vector3d cq = sq.start + 0.5 * sq.length * sq.direction;
      const bool near = (cp - cq).norm() < options.near_factor * std::max(sp.length, sq.length);
      const PairMoments pm = pair_moments(sp, sq, k, rule, near);
      table[p * ns + q] = pm;
      PairMoments swapped;
      swapped.m = {pm.m[0], pm.m[2], pm.m[1], pm.m[3]};
      table[q * ns + p] = swapped;
    }
  }

  const cplx vector_factor(0.0, omega * kMu0);
  const cplx scalar_factor = 1.0 / cplx(0.0, omega * kEps0);
  const auto nb = static_cast<Eigen::Index>(mom.basis.size());
  mom.z = CMat::Zero(nb, nb);
  for (Eigen::Index m = 0; m < nb; ++m) {
    const auto tm = shape_terms(mom, mom.basis[m]);
    for (Eigen::Index n = m; n < nb; ++n) {
      const auto tn = shape_terms(mom, mom.basis[n]);
      cplx acc = 0.0;
      for (const ShapeTerm& a : tm) {
        for (const ShapeTerm& b : tn) {
          const PairMoments& pm = table[a.segment * ns + b.segment];
          const double tdot = mom.segments[a.segment].direction.dot(mom.segments[b.segment].direction);
          const cplx shaped = a.c0 * b.c0 * pm.m[0] + a.c1 * b.c0 * pm.m[1] +
                              a.c0 * b.c1 * pm.m[2] + a.c1 * b.c1 * pm.m[3];
          acc += vector_factor * tdot * shaped + scalar_factor * (a.c1 * b.c1) * pm.m[0];
        }
      }
      mom.z(m, n) = acc;
      mom.z(n, m) = acc;
    }
  }

  for (Eigen::Index m = 0; m < nb; ++m) {
    const cplx d = mom.z(m, m);
    bool bad = !std::isfinite(d.real()) || !std::isfinite(d.imag()) || d.real() < 0.0;
    for (Eigen::Index n = 0; n < nb && !bad; ++n) {
      bad = !std::isfinite(mom.z(m, n).real()) || !std::isfinite(mom.z(m, n).imag());
    }
    if (bad) {
      std::ostringstream msg;
      msg << "near-singular self term on wire " << mom.segments[mom.basis[m].rising].wire
          << " (basis " << m << ") at " << frequency << " Hz";
      throw AssemblyError(msg.str());
    }
  }
  return mom;
}

CVec excitation_vector(const WireScene& scene, int port) {
  if (port < 0 || port >= scene.port_count()) throw DomainError("excitation_vector: no such port");
  CVec v = CVec::Zero(scene.basis_count());
  v(scene.port_basis(port)) = 1.0;
  return v;
}

CMat excitation_matrix(const WireScene& scene, double zeta) {
  CMat e = CMat::Zero(scene.basis_count(), scene.port_count());
  for (int k = 0; k < scene.port_count(); ++k) e(scene.port_basis(k), k) = zeta;
  return e;
}

}  // namespace clusterfeed
