#include "clusterfeed/cluster_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/port_model.hpp"

namespace clusterfeed {

ClusterPlan::ClusterPlan(std::vector<int> cluster_of_port) : membership_(std::move(cluster_of_port)) {
  if (membership_.empty()) throw ValidationError("cluster plan needs at least one port");
  const int m_count = *std::max_element(membership_.begin(), membership_.end()) + 1;
  if (*std::min_element(membership_.begin(), membership_.end()) < 0) {
    throw ValidationError("cluster plan: negative cluster index");
  }
  ports_of_.resize(m_count);
  for (std::size_t k = 0; k < membership_.size(); ++k) {
    ports_of_[membership_[k]].push_back(static_cast<Eigen::Index>(k));
  }
  for (int m = 0; m < m_count; ++m) {
    if (ports_of_[m].empty()) throw ValidationError("cluster plan: cluster " + std::to_string(m + 1) + " is empty");
    RMat c = RMat::Zero(ports(), static_cast<Eigen::Index>(ports_of_[m].size()));
    for (std::size_t l = 0; l < ports_of_[m].size(); ++l) c(ports_of_[m][l], static_cast<Eigen::Index>(l)) = 1.0;
    selectors_.push_back(std::move(c));
  }
}

CVec ClusterPlan::restrict(const CVec& v, int m) const {
  CVec out(static_cast<Eigen::Index>(ports_of_[m].size()));
  for (std::size_t l = 0; l < ports_of_[m].size(); ++l) out(static_cast<Eigen::Index>(l)) = v(ports_of_[m][l]);
  return out;
}

CVec ClusterPlan::isolate(const CVec& v, int m) const {
  CVec out = CVec::Zero(v.size());
  for (Eigen::Index k : ports_of_[m]) out(k) = v(k);
  return out;
}

CMat embed(const ClusterPlan& plan, const CMat& g0, int m, int n) {
  if (m < 0 || n < 0 || m >= plan.clusters() || n >= plan.clusters()) {
    throw DomainError("embed: cluster index out of range");
  }
  if (g0.rows() != plan.ports() || g0.cols() != plan.ports()) throw DomainError("embed: g0 does not match the plan");
  CMat out = CMat::Zero(g0.rows(), g0.cols());
  for (Eigen::Index r : plan.ports_of(m)) {
    for (Eigen::Index c : plan.ports_of(n)) out(r, c) = g0(r, c);
  }
  return out;
}

ConstraintMatrices::ConstraintMatrices(const ClusterPlan& plan, const CMat& g0) : clusters_(plan.clusters()) {
  const cplx i(0.0, 1.0);
  for (int m = 0; m < clusters_; ++m) self_.push_back(embed(plan, g0, m, m));
  for (int m = 0; m < clusters_; ++m) {
    for (int n = m + 1; n < clusters_; ++n) {
      const CMat mn = embed(plan, g0, m, n);
      const CMat nm = embed(plan, g0, n, m);
      real_.push_back(mn + nm);
      imag_.push_back(i * (mn - nm));
    }
  }
}

int ConstraintMatrices::pair_index(int m, int n) const {
  if (m == n || m < 0 || n < 0 || m >= clusters_ || n >= clusters_) {
    throw DomainError("constraint matrices: invalid cluster pair");
  }
  if (m > n) std::swap(m, n);
  // row-major position in the strictly upper triangle
  return m * clusters_ - m * (m + 1) / 2 + (n - m - 1);
}

ConstraintMatrices constraint_matrices(const ClusterPlan& plan, const CMat& g0) {
  return ConstraintMatrices(plan, g0);
}

double ecc_from_ratios(double beta, double gamma, double self_ratio) {
  if (beta == 1.0) throw DomainError("ecc_from_ratios: beta = 1 makes the denominator vanish");
  if (!(self_ratio > 0.0)) throw DomainError("ecc_from_ratios: R must be positive");
  const double scale = (1.0 + self_ratio) / (2.0 * std::sqrt(self_ratio));
  return scale * scale * (beta * beta + gamma * gamma) / ((beta - 1.0) * (beta - 1.0));
}

double self_ratio_alpha(double beta, double self_ratio) {
  if (!(self_ratio > 0.0)) throw DomainError("self ratio R must be positive");
  return (1.0 - beta) / (1.0 + self_ratio);
}

std::pair<double, double> Ellipse::point(double t) const {
  return {center_beta + semi_beta * std::cos(t), center_gamma + semi_gamma * std::sin(t)};
}

bool Ellipse::contains(double beta, double gamma) const {
  if (semi_beta == 0.0 || semi_gamma == 0.0) return beta == center_beta && gamma == center_gamma;
  const double x = (beta - center_beta) / semi_beta;
  const double y = (gamma - center_gamma) / semi_gamma;
  return x * x + y * y <= 1.0;
}

Ellipse ecc_isoline(double ecc, double self_ratio) {
  if (!(ecc > 0.0 && ecc < 1.0)) throw DomainError("ecc_isoline: E must lie in (0, 1)");
  if (!(self_ratio > 0.0)) throw DomainError("ecc_isoline: R must be positive");
  const double scale = (1.0 + self_ratio) / (2.0 * std::sqrt(self_ratio));
  const double e = ecc / (scale * scale);  // the R = 1 level with the same ellipse
  Ellipse out;
  out.center_beta = -e / (1.0 - e);
  out.semi_beta = std::sqrt(e) / (1.0 - e);
  out.semi_gamma = std::sqrt(e / (1.0 - e));
  return out;
}

const PairIntervals& FeasibleIntervals::pair(int m, int n) const {
  if (m > n) std::swap(m, n);
  for (const auto& p : pairs) {
    if (p.m == m && p.n == n) return p;
  }
  throw DomainError("feasible intervals: no such cluster pair");
}

namespace {

RatioInterval pencil_interval(const CMat& a, const CMat& g0, Eigen::Index* deflated) {
  const PencilEigen pe = hermitian_pencil(a, g0, 1e-12);
  if (deflated) *deflated = pe.deflated;
  RatioInterval out;
  if (pe.values.size() == 0) return out;
  const Eigen::Index last = pe.values.size() - 1;
  out.min = pe.values(0);
  out.max = pe.values(last);
  out.min_vector = pe.vectors.col(0);
  out.max_vector = pe.vectors.col(last);
  return out;
}

}  // namespace

FeasibleIntervals feasible_intervals(const ClusterPlan& plan, const PortModel& pm) {
  if (pm.ports() != plan.ports()) throw DomainError("feasible_intervals: plan does not match the port model");
  const ConstraintMatrices cm(plan, pm.g0);
  FeasibleIntervals out;
  Eigen::Index deflated = 0;
  for (int m = 0; m < plan.clusters(); ++m) {
    RatioInterval iv = pencil_interval(cm.self(m), pm.g0, &deflated);
    iv.min = 0.0;  // feeding only the other clusters (or nothing) gives zero self power
    out.alpha.push_back(std::move(iv));
  }
  for (int m = 0; m < plan.clusters(); ++m) {
    for (int n = m + 1; n < plan.clusters(); ++n) {
      PairIntervals p;
      p.m = m;
      p.n = n;
      p.beta = pencil_interval(cm.real_mutual(m, n), pm.g0, &deflated);
      p.gamma = pencil_interval(cm.imag_mutual(m, n), pm.g0, &deflated);
      out.pairs.push_back(std::move(p));
    }
  }
  out.deflated = deflated;
  if (deflated > 0) {
    std::ostringstream msg;
    msg << "g0 is numerically singular at " << pm.frequency << " Hz; pencils solved on a "
        << (pm.ports() - deflated) << "-dimensional subspace";
    out.warnings.push_back(msg.str());
  }
  return out;
}

RatioTargets RatioTargets::two_cluster(double self_ratio, double beta, double gamma) {
  RatioTargets t;
  t.self_ratio = self_ratio;
  t.pairs.push_back(PairTarget{0, 1, beta, gamma});
  return t;
}

RatioTargets RatioTargets::ecc_capped(double self_ratio, double ecc_cap) {
  RatioTargets t;
  t.self_ratio = self_ratio;
  t.ecc_cap = ecc_cap;
  return t;
}

std::vector<std::optional<double>> RatioTargets::resolved_alpha(int clusters) const {
  std::vector<std::optional<double>> out(clusters);
  for (std::size_t m = 0; m < alpha.size() && static_cast<int>(m) < clusters; ++m) out[m] = alpha[m];
  if (self_ratio && clusters == 2) {
    for (const auto& p : pairs) {
      if (p.m == 0 && p.n == 1) {
        const double a11 = self_ratio_alpha(p.beta, *self_ratio);
        out[0] = a11;
        out[1] = *self_ratio * a11;
      }
    }
  }
  return out;
}

void RatioTargets::validate(int clusters) const {
  if (clusters < 1) throw ValidationError("targets: no clusters");
  if (static_cast<int>(alpha.size()) > clusters) throw ValidationError("targets: more alpha values than clusters");
  if (self_ratio) {
    if (clusters != 2) throw ValidationError("targets: the self-power ratio R applies to two clusters only");
    if (!(*self_ratio > 0.0) || !std::isfinite(*self_ratio)) throw ValidationError("targets: R must be positive");
  }
  for (const auto& p : pairs) {
    if (p.m < 0 || p.n <= p.m || p.n >= clusters) throw ValidationError("targets: pair indices must satisfy m < n < M");
    if (!std::isfinite(p.beta) || !std::isfinite(p.gamma)) throw ValidationError("targets: beta and gamma must be finite");
  }
  if (ecc_cap) {
    if (clusters != 2) throw ValidationError("targets: the ECC cap applies to two clusters only");
    if (!(*ecc_cap >= 0.0 && *ecc_cap < 1.0)) throw ValidationError("targets: E_max must lie in [0, 1)");
  }
  const auto a = resolved_alpha(clusters);
  const bool all_alpha = std::all_of(a.begin(), a.end(), [](const auto& x) { return x.has_value(); });
  const std::size_t pair_count = static_cast<std::size_t>(clusters * (clusters - 1) / 2);
  if (all_alpha && pairs.size() == pair_count) {
    double sum = 0.0;
    for (const auto& x : a) sum += *x;
    for (const auto& p : pairs) sum += p.beta;
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "targets: sum of alpha_mm and beta_mn is " << sum << ", must be 1";
      throw ValidationError(msg.str());
    }
  }
}

std::string screen_targets(const RatioTargets& targets, const FeasibleIntervals& intervals, int clusters) {
  constexpr double tol = 1e-9;
  const auto a = targets.resolved_alpha(clusters);
  std::ostringstream why;
  for (int m = 0; m < clusters; ++m) {
    if (a[m] && !intervals.alpha[m].contains(*a[m], tol)) {
      why << "alpha_" << m + 1 << m + 1 << " = " << *a[m] << " outside [0, " << intervals.alpha[m].max << "]";
      return why.str();
    }
  }
  for (const auto& p : targets.pairs) {
    const PairIntervals& iv = intervals.pair(p.m, p.n);
    if (!iv.beta.contains(p.beta, tol)) {
      why << "beta = " << p.beta << " outside [" << iv.beta.min << ", " << iv.beta.max << "]";
      return why.str();
    }
    if (!iv.gamma.contains(p.gamma, tol)) {
      why << "gamma = " << p.gamma << " outside [" << iv.gamma.min << ", " << iv.gamma.max << "]";
      return why.str();
    }
    // |P_mn|^2 <= P_mm P_nn
    if (a[p.m] && a[p.n] && 0.25 * (p.beta * p.beta + p.gamma * p.gamma) > *a[p.m] * *a[p.n] * (1.0 + 1e-12) + 1e-15) {
      why << "pair (" << p.m + 1 << "," << p.n + 1 << ") would need a correlation above 1";
      return why.str();
    }
  }
  return {};
}

}  // namespace clusterfeed
