#include "clusterfeed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include "clusterfeed/errors.hpp"

namespace clusterfeed {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kDualOptimal: return "dual-optimal";
    case SolveStatus::kPrimalStationary: return "primal-stationary";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

std::optional<double> SolveResult::ecc12() const {
  if (!report || report->clusters() < 2) return std::nullopt;
  return report->envelope_correlation(0, 1);
}

QcqpProblem QcqpProblem::build(const PortModel& pm, const ClusterPlan& plan, const RatioTargets& targets) {
  if (pm.ports() != plan.ports()) throw ValidationError("problem: plan does not match the port model");
  targets.validate(plan.clusters());
  QcqpProblem p;
  p.port_model = pm;
  p.plan = plan;
  p.targets = targets;
  p.objective = pm.g0;
  p.normalization = hermitian_part(pm.incident_form());
  p.ecc_cap = targets.ecc_cap;

  const int mc = plan.clusters();
  const ConstraintMatrices cm(plan, pm.g0);
  const auto alpha = targets.resolved_alpha(mc);
  const bool all_alpha = std::all_of(alpha.begin(), alpha.end(), [](const auto& a) { return a.has_value(); });
  const bool all_pairs = static_cast<int>(targets.pairs.size()) == mc * (mc - 1) / 2;
  // with every alpha and beta fixed, the last self constraint follows from the ratio sum
  const int self_count = (all_alpha && all_pairs && mc > 1) ? mc - 1 : mc;
  for (int m = 0; m < self_count; ++m) {
    if (!alpha[m]) continue;
    p.equalities.push_back({"alpha_" + std::to_string(m + 1) + std::to_string(m + 1), cm.self(m), *alpha[m]});
  }
  for (const auto& pt : targets.pairs) {
    const std::string tag = std::to_string(pt.m + 1) + std::to_string(pt.n + 1);
    p.equalities.push_back({"beta_" + tag, cm.real_mutual(pt.m, pt.n), pt.beta});
    p.equalities.push_back({"gamma_" + tag, cm.imag_mutual(pt.m, pt.n), pt.gamma});
  }
  if (targets.self_ratio && !alpha[0]) {
    // P_22 = R P_11 without fixing beta
    p.equalities.push_back({"R", cm.self(1) - *targets.self_ratio * cm.self(0), 0.0});
  }
  return p;
}

CMat QcqpProblem::homogeneous(std::size_t k) const {
  return equalities.at(k).form - equalities.at(k).target * objective;
}

namespace {

struct Whitened {
  CMat basis;  // v = T w with T^H Q0 T = I
  CMat a;
  std::vector<CMat> b;
};

Whitened whiten(const QcqpProblem& p) {
  Whitened w;
  w.basis = whitening_basis(p.normalization, 1e-12);
  w.a = hermitian_part(w.basis.adjoint() * p.objective * w.basis);
  for (std::size_t k = 0; k < p.equalities.size(); ++k) {
    w.b.push_back(hermitian_part(w.basis.adjoint() * p.homogeneous(k) * w.basis));
  }
  return w;
}

struct DualPoint {
  RVec mu;
  double value = 0.0;  // lambda_max
  RVec gradient;
  Eigen::SelfAdjointEigenSolver<CMat> eig;
};

DualPoint evaluate_dual(const Whitened& w, const RVec& mu) {
  CMat c = w.a;
  for (std::size_t k = 0; k < w.b.size(); ++k) c += mu(static_cast<Eigen::Index>(k)) * w.b[k];
  DualPoint d;
  d.mu = mu;
  d.eig.compute(hermitian_part(c));
  const Eigen::Index last = c.rows() - 1;
  d.value = d.eig.eigenvalues()(last);
  const CVec u = d.eig.eigenvectors().col(last);
  d.gradient.resize(mu.size());
  for (std::size_t k = 0; k < w.b.size(); ++k) {
    d.gradient(static_cast<Eigen::Index>(k)) = quadratic_form(w.b[k], u);
  }
  return d;
}

RMat dual_hessian(const Whitened& w, const DualPoint& d) {
  const Eigen::Index n = w.a.rows();
  const auto kc = static_cast<Eigen::Index>(w.b.size());
  const Eigen::Index last = n - 1;
  const CVec u = d.eig.eigenvectors().col(last);
  const double lam1 = d.eig.eigenvalues()(last);
  const double scale = std::max(1.0, std::abs(lam1));
  CMat coupling(kc, last);
  for (Eigen::Index k = 0; k < kc; ++k) {
    const CVec bu = w.b[k] * u;
    for (Eigen::Index j = 0; j < last; ++j) coupling(k, j) = d.eig.eigenvectors().col(j).dot(bu);
  }
  RMat h = RMat::Zero(kc, kc);
  for (Eigen::Index j = 0; j < last; ++j) {
    const double gap = std::max(lam1 - d.eig.eigenvalues()(j), 1e-13 * scale);
    for (Eigen::Index k = 0; k < kc; ++k) {
      for (Eigen::Index l = 0; l < kc; ++l) {
        h(k, l) += 2.0 * (std::conj(coupling(k, j)) * coupling(l, j)).real() / gap;
      }
    }
  }
  return 0.5 * (h + h.transpose());
}

struct DualOutcome {
  DualPoint best;
  int iterations = 0;
  bool infeasible = false;
};

// Newton descent on the convex function lambda_max(A + sum mu_k B_k) with a
// PSD-regularized Hessian from eigenvalue perturbation theory.
DualOutcome minimize_dual(const Whitened& w, const SolverOptions& opt) {
  const auto kc = static_cast<Eigen::Index>(w.b.size());
  const double a_top = std::max(w.a.rows() ? Eigen::SelfAdjointEigenSolver<CMat>(w.a, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff() : 0.0, 1e-300);
  DualOutcome out;
  out.best = evaluate_dual(w, RVec::Zero(kc));
  if (kc == 0) return out;
  DualPoint cur = out.best;
  std::vector<double> history;
  for (int it = 0; it < opt.max_dual_iterations; ++it) {
    out.iterations = it + 1;
    if (cur.value < -1e-9 * a_top) {
      out.infeasible = true;
      break;
    }
    const double gnorm = cur.gradient.lpNorm<Eigen::Infinity>();
    if (gnorm <= 1e-15 * std::max(cur.value, 1e-12)) break;
    RMat h = dual_hessian(w, cur);
    const double reg = 1e-12 * std::max(h.trace(), 1e-300) + 1e-300;
    h.diagonal().array() += reg;
    RVec step = h.ldlt().solve(-cur.gradient);
    if (!step.allFinite() || cur.gradient.dot(step) >= 0.0) step = -cur.gradient;
    const auto line_search = [&](const RVec& dir) -> std::optional<DualPoint> {
      double t = 1.0;
      const double slope = cur.gradient.dot(dir);
      for (int ls = 0; ls < 60; ++ls) {
        RVec mu = (cur.mu + t * dir).cwiseMax(-opt.multiplier_box).cwiseMin(opt.multiplier_box);
        DualPoint trial = evaluate_dual(w, mu);
        if (trial.value <= cur.value + 1e-4 * t * slope) return trial;
        t *= 0.5;
      }
      return std::nullopt;
    };
    auto next = line_search(step);
    if (!next) next = line_search(-cur.gradient / std::max(cur.gradient.norm(), 1e-300) * 1e-3);
    if (!next) break;
    const double decrease = cur.value - next->value;
    cur = std::move(*next);
    if (cur.value < out.best.value) out.best = cur;
    // at a multiple top eigenvalue Newton crawls; any mu is a valid bound, so stop once it stalls
    history.push_back(cur.value);
    if (history.size() > 5 && history[history.size() - 6] - cur.value <= 1e-10 * std::max(1.0, std::abs(cur.value))) {
      break;
    }
    if (decrease <= 1e-16 * std::max(1.0, std::abs(cur.value)) &&
        cur.gradient.lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(cur.value, 1e-12)) {
      break;
    }
  }
  return out;
}

std::vector<RMat> realified(const std::vector<CMat>& ms) {
  std::vector<RMat> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(realify(m));
  return out;
}

double max_relative_residual(const Whitened& w, const CVec& x) {
  const double f = quadratic_form(w.a, x);
  double worst = 0.0;
  for (const auto& b : w.b) worst = std::max(worst, std::abs(quadratic_form(b, x)) / std::max(f, 1e-300));
  return worst;
}

void fill_result(SolveResult& r, const QcqpProblem& p, const CVec& v_raw) {
  double pin = incident_power(p.port_model, v_raw);
  r.v = v_raw / std::sqrt(pin);
  r.report = feed_report(p.port_model, p.plan, r.v);
  r.radiated_power = r.report->radiated_power;
  r.efficiency = r.report->efficiency;
  r.residuals.resize(static_cast<Eigen::Index>(p.equalities.size()));
  for (std::size_t k = 0; k < p.equalities.size(); ++k) {
    r.residuals(static_cast<Eigen::Index>(k)) =
        0.5 * quadratic_form(p.homogeneous(k), r.v) / std::max(r.radiated_power, 1e-300);
  }
}

}  // namespace

SolveResult max_efficiency(const PortModel& pm, const ClusterPlan& plan) {
  SolveResult r;
  const PencilEigen pe = hermitian_pencil(pm.g0, hermitian_part(pm.incident_form()), 1e-12);
  if (pe.values.size() == 0) {
    r.notes.push_back("incident-power form has an empty range");
    return r;
  }
  const Eigen::Index top = pe.values.size() - 1;
  const CVec v = pe.vectors.col(top) * std::sqrt(2.0);  // x^H Q0 x = 1, Pin = 1 W
  r.v = v;
  r.report = feed_report(pm, plan, v);
  r.radiated_power = r.report->radiated_power;
  r.efficiency = r.report->efficiency;
  r.status = SolveStatus::kDualOptimal;
  r.dual_bound = pe.values(top);
  r.duality_gap = r.dual_bound - r.efficiency;
  r.residuals.resize(0);
  r.multipliers.resize(0);
  if (pe.deflated > 0) r.notes.push_back("incident-power form deflated");
  return r;
}

SolveResult solve_constrained(const QcqpProblem& problem, const SolverOptions& options) {
  SolveResult r;
  const int mc = problem.plan.clusters();
  if (options.prescreen) {
    const FeasibleIntervals iv = feasible_intervals(problem.plan, problem.port_model);
    const std::string why = screen_targets(problem.targets, iv, mc);
    if (!why.empty()) {
      r.notes.push_back("infeasible by construction: " + why);
      return r;
    }
  }
  const Whitened w = whiten(problem);
  if (w.basis.cols() == 0) {
    r.notes.push_back("incident-power form has an empty range");
    return r;
  }
  const DualOutcome dual = minimize_dual(w, options);
  r.dual_iterations = dual.iterations;
  r.multipliers = dual.best.mu;
  r.dual_bound = dual.best.value;
  if (dual.infeasible) {
    r.notes.push_back("dual certificate: lambda_max < 0 for some multipliers");
    return r;
  }

  const Eigen::Index n = w.a.rows();
  const auto& evals = dual.best.eig.eigenvalues();
  const auto& evecs = dual.best.eig.eigenvectors();
  const double lam1 = evals(n - 1);
  std::optional<CVec> candidate;

  CVec u1 = evecs.col(n - 1);
  if (max_relative_residual(w, u1) <= options.residual_tol) {
    candidate = u1;
  } else {
    // top eigenvalue (nearly) repeated: look for a rank-one point inside the eigenspace
    const double cluster_tol = std::max(1e-7 * std::abs(lam1), 1e-10);
    Eigen::Index r_dim = 0;
    while (r_dim < n && evals(n - 1 - r_dim) >= lam1 - cluster_tol) ++r_dim;
    if (r_dim > 1) {
      const CMat u = evecs.rightCols(r_dim);
      PrimalProblem sub;
      sub.objective = realify(CMat(u.adjoint() * w.a * u));
      for (const auto& b : w.b) sub.equalities.push_back(realify(CMat(u.adjoint() * b * u)));
      std::vector<RVec> starts;
      for (Eigen::Index i = 0; i < r_dim; ++i) {
        CVec e = CVec::Zero(r_dim);
        e(i) = 1.0;
        starts.push_back(realify(e));
        e(i) = cplx(0.0, 1.0);
        if (i + 1 < r_dim) {
          e(i + 1) = 1.0;
          starts.push_back(realify(e));
        }
      }
      const PrimalResult pr = solve_primal(sub, starts, options.primal);
      if (pr.feasible) {
        const CVec x = u * complexify(pr.x);
        if (max_relative_residual(w, x) <= options.residual_tol) candidate = x;
      }
    }
  }

  if (!candidate) {
    // primal fallback from spread starts
    PrimalProblem pb;
    pb.objective = realify(w.a);
    pb.equalities = realified(w.b);
    std::vector<RVec> starts;
    for (Eigen::Index j = n - 1; j >= std::max<Eigen::Index>(0, n - 4); --j) starts.push_back(realify(CVec(evecs.col(j))));
    {
      Eigen::SelfAdjointEigenSolver<CMat> ea(w.a);
      for (Eigen::Index j = n - 1; j >= std::max<Eigen::Index>(0, n - 2); --j) {
        starts.push_back(realify(CVec(ea.eigenvectors().col(j))));
      }
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    std::vector<std::pair<double, CVec>> pool;
    for (int s = 0; s < options.elite_samples; ++s) {
      CVec x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = cplx(normal(rng), normal(rng));
      double bad = 0.0;
      const double f = quadratic_form(w.a, x);
      for (const auto& b : w.b) bad += std::pow(quadratic_form(b, x) / std::max(f, 1e-300), 2);
      pool.emplace_back(bad, x);
    }
    std::stable_sort(pool.begin(), pool.end(), [](const auto& l, const auto& rr) { return l.first < rr.first; });
    for (std::size_t i = 0; i < pool.size() && static_cast<int>(starts.size()) < options.multistarts; ++i) {
      starts.push_back(realify(pool[i].second));
    }
    const PrimalResult pr = solve_primal(pb, starts, options.primal);
    const CVec x = complexify(pr.x);
    if (pr.x.size() > 0 && max_relative_residual(w, x) <= options.residual_tol) {
      candidate = x;
    } else {
      std::ostringstream msg;
      msg << "no feasible point after " << starts.size() << " starts; best residual "
          << (pr.x.size() ? max_relative_residual(w, x) : std::numeric_limits<double>::infinity());
      r.notes.push_back(msg.str());
      if (pr.x.size() > 0 && quadratic_form(w.a, x) > 0.0) {
        fill_result(r, problem, w.basis * x);
        r.duality_gap = r.dual_bound - r.efficiency;
      }
      r.status = SolveStatus::kInfeasible;
      return r;
    }
  }

  fill_result(r, problem, w.basis * *candidate);
  r.duality_gap = r.dual_bound - r.efficiency;
  const double rel_gap = r.duality_gap / std::max(r.dual_bound, 1e-300);
  r.status = rel_gap <= options.gap_tol ? SolveStatus::kDualOptimal : SolveStatus::kPrimalStationary;
  if (r.status == SolveStatus::kPrimalStationary) {
    std::ostringstream msg;
    msg << "duality gap " << r.duality_gap << " (relative " << rel_gap << ")";
    r.notes.push_back(msg.str());
  }
  return r;
}

std::vector<double> ecc_levels(double e_max) {
  static const double ladder[] = {0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> out{0.0};
  for (double l : ladder) {
    if (l < e_max) out.push_back(l);
  }
  if (e_max > 0.0) out.push_back(e_max);
  return out;
}

namespace {

using TargetMemo = std::map<std::pair<double, double>, SolveResult>;

struct CapPoint {
  double ecc = 0.0;
  double angle = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double efficiency = 0.0;
};

double wrap_angle(double t) {
  t = std::fmod(t, 2.0 * kPi);
  return t < 0.0 ? t + 2.0 * kPi : t;
}

SolveResult ecc_capped(const QcqpProblem& problem, const EccCapOptions& options, TargetMemo& memo,
                       std::pair<double, double>* chosen = nullptr) {
  if (problem.plan.clusters() != 2) throw ValidationError("ECC-capped solve needs exactly two clusters");
  if (!problem.ecc_cap) throw ValidationError("ECC-capped solve needs E_max in the targets");
  if (!problem.targets.self_ratio) throw ValidationError("ECC-capped solve needs the self-power ratio R");
  const double e_max = *problem.ecc_cap;
  const double ratio = *problem.targets.self_ratio;
  if (!(e_max >= 0.0 && e_max < 1.0)) throw DomainError("E_max must lie in [0, 1)");

  int evaluations = 0;
  const auto solve_at = [&](double beta, double gamma) -> const SolveResult& {
    const auto key = std::make_pair(beta, gamma);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ++evaluations;
    const QcqpProblem sub = QcqpProblem::build(problem.port_model, problem.plan,
                                               RatioTargets::two_cluster(ratio, beta, gamma));
    return memo[key] = solve_constrained(sub, options.solver);
  };

  SolveResult best = solve_at(0.0, 0.0);
  if (e_max == 0.0) {
    best.notes.push_back("E_max = 0: beta = gamma = 0");
    if (chosen) *chosen = {0.0, 0.0};
    return best;
  }
  bool have = best.feasible();
  CapPoint best_point{0.0, 0.0, 0.0, 0.0, have ? best.efficiency : -1.0};
  std::vector<CapPoint> visited;
  if (have) visited.push_back(best_point);

  // (E, t) -> (beta, gamma); E = 0 collapses to the origin
  const auto evaluate_at = [&](double e, double t, double beta, double gamma, CapPoint* out) {
    if (beta >= 1.0) return false;
    const SolveResult& s = solve_at(beta, gamma);
    if (!s.feasible()) return false;
    *out = {e, t, beta, gamma, s.efficiency};
    if (!have || s.efficiency > best.efficiency) {
      best = s;
      best_point = *out;
      have = true;
    }
    return true;
  };
  const auto evaluate = [&](double e, double t, CapPoint* out) {
    e = std::clamp(e, 0.0, e_max);
    t = wrap_angle(t);
    double beta = 0.0, gamma = 0.0;
    if (e > 0.0) std::tie(beta, gamma) = ecc_isoline(e, ratio).point(t);
    return evaluate_at(e, t, beta, gamma, out);
  };

  CapPoint p;
  for (const auto& [beta, gamma] : options.warm_start) {
    if (beta >= 1.0) continue;
    const double e = ecc_from_ratios(beta, gamma, ratio);
    if (e > e_max * (1.0 + 1e-12) || e == 0.0) continue;
    const Ellipse el = ecc_isoline(e, ratio);
    const double t = std::atan2((gamma - el.center_gamma) / el.semi_gamma, (beta - el.center_beta) / el.semi_beta);
    if (evaluate_at(e, wrap_angle(t), beta, gamma, &p)) visited.push_back(p);
  }
  for (double e : ecc_levels(e_max)) {
    if (e == 0.0) continue;
    const int n = e == e_max ? std::max(options.angles, options.boundary_angles) : options.angles;
    for (int a = 0; a < n; ++a) {
      if (evaluate(e, 2.0 * kPi * a / n, &p)) visited.push_back(p);
    }
  }

  if (have) {
    // starts: best sweep points, pairwise at least an eighth of a turn apart
    std::stable_sort(visited.begin(), visited.end(),
                     [](const CapPoint& x, const CapPoint& y) { return x.efficiency > y.efficiency; });
    std::vector<CapPoint> starts;
    for (const CapPoint& c : visited) {
      if (static_cast<int>(starts.size()) >= options.refine_starts) break;
      const bool distinct = std::all_of(starts.begin(), starts.end(), [&](const CapPoint& s) {
        const double d = std::abs(wrap_angle(c.angle - s.angle + kPi) - kPi);
        return d > kPi / 4.0 || (c.ecc == 0.0) != (s.ecc == 0.0);
      });
      if (distinct) starts.push_back(c);
    }
    const int levels = static_cast<int>(ecc_levels(e_max).size()) - 1;
    for (const CapPoint& start : starts) {
      CapPoint cur = start;
      double de = e_max / std::max(levels, 1);
      double dt = 2.0 * kPi / options.angles;
      int budget = options.max_refine_evaluations;
      while (budget > 0 && (de > options.refine_tolerance * e_max || dt > options.refine_tolerance * 2.0 * kPi)) {
        const double cands[4][2] = {{cur.ecc + de, cur.angle}, {cur.ecc - de, cur.angle},
                                    {cur.ecc, cur.angle + dt}, {cur.ecc, cur.angle - dt}};
        bool improved = false;
        for (const auto& c : cands) {
          if (budget <= 0) break;
          const int before = evaluations;
          const bool ok = evaluate(c[0], c[1], &p);
          budget -= evaluations - before;
          if (ok && p.efficiency > cur.efficiency) {
            cur = p;
            improved = true;
            break;
          }
        }
        if (!improved) {
          de *= 0.5;
          dt *= 0.5;
        }
      }
    }
  }
  std::ostringstream msg;
  msg << evaluations << " target solves";
  if (!have) {
    SolveResult r;
    r.notes.push_back("no feasible target on or inside the E_max isoline; " + msg.str());
    return r;
  }
  best.notes.push_back(msg.str());
  if (chosen) *chosen = {best_point.beta, best_point.gamma};
  return best;
}

}  // namespace

SolveResult solve_ecc_capped(const QcqpProblem& problem, const EccCapOptions& options) {
  TargetMemo memo;
  return ecc_capped(problem, options, memo);
}

std::vector<SolveResult> solve_ecc_caps(const PortModel& pm, const ClusterPlan& plan, double self_ratio,
                                        std::vector<double> caps, const EccCapOptions& options) {
  std::vector<std::size_t> order(caps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return caps[a] < caps[b]; });
  std::vector<SolveResult> out(caps.size());
  TargetMemo memo;
  EccCapOptions opt = options;
  for (std::size_t i : order) {
    const QcqpProblem p = QcqpProblem::build(pm, plan, RatioTargets::ecc_capped(self_ratio, caps[i]));
    std::pair<double, double> target{0.0, 0.0};
    out[i] = ecc_capped(p, opt, memo, &target);
    // a smaller cap's optimum is feasible for every larger cap
    if (out[i].feasible()) opt.warm_start.push_back(target);
  }
  return out;
}

}  // namespace clusterfeed
