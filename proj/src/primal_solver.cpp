#include "clusterfeed/primal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clusterfeed {

double rayleigh(const RMat& m, const RVec& x, RVec* grad) {
  const double nn = x.squaredNorm();
  const RVec mx = m * x;
  const double r = x.dot(mx) / nn;
  if (grad) *grad = 2.0 * (mx - r * x) / nn;
  return r;
}

BfgsResult bfgs_minimize(const SmoothFunction& f, RVec x, double gradient_tol, int max_iterations) {
  const Eigen::Index n = x.size();
  RVec g(n);
  double fx = f(x, &g);
  RMat h = RMat::Identity(n, n);
  BfgsResult out;
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (!std::isfinite(fx) || g.norm() <= gradient_tol) break;
    RVec p = -h * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      h.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    RVec xn(n), gn(n);
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + t * p;
      fn = f(xn, &gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (h.isIdentity()) break;
      h.setIdentity();
      continue;
    }
    const RVec s = xn - x;
    const RVec y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (it == 0) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const RVec hy = h * y;
      h += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
    const bool stalled = std::abs(fx - fn) <= 1e-16 * std::max(1.0, std::abs(fx)) && s.norm() < 1e-14 * x.norm();
    x = xn;
    fx = fn;
    g = gn;
    if (stalled) break;
  }
  out.x = x;
  out.value = fx;
  out.gradient_norm = g.norm();
  out.iterations = it;
  return out;
}

namespace {

struct Evaluation {
  double objective = 0.0;
  RVec residuals;
  double max_residual = 0.0;
  double max_inequality = -std::numeric_limits<double>::infinity();
};

Evaluation evaluate(const PrimalProblem& pb, const RVec& x) {
  Evaluation e;
  e.objective = rayleigh(pb.objective, x, nullptr);
  e.residuals.resize(static_cast<Eigen::Index>(pb.equalities.size()));
  for (std::size_t k = 0; k < pb.equalities.size(); ++k) {
    e.residuals(static_cast<Eigen::Index>(k)) = rayleigh(pb.equalities[k], x, nullptr);
  }
  e.max_residual = e.residuals.size() ? e.residuals.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& q : pb.inequalities) e.max_inequality = std::max(e.max_inequality, q(x, nullptr));
  if (pb.inequalities.empty()) e.max_inequality = 0.0;
  return e;
}

RVec run_from(const PrimalProblem& pb, RVec x, const PrimalOptions& opt) {
  const std::size_t ne = pb.equalities.size();
  const std::size_t ni = pb.inequalities.size();
  x.normalize();
  bool barrier = ni > 0;
  for (const auto& q : pb.inequalities) {
    if (!(q(x, nullptr) < 0.0)) barrier = false;
  }
  RVec lambda = RVec::Zero(static_cast<Eigen::Index>(ne));
  double rho = 10.0;
  double tau = 1e-3;
  double previous = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    const SmoothFunction lagrangian = [&](const RVec& z, RVec* grad) -> double {
      RVec gk(z.size());
      double val = -rayleigh(pb.objective, z, grad);
      if (grad) *grad = -*grad;
      for (std::size_t k = 0; k < ne; ++k) {
        const double h = rayleigh(pb.equalities[k], z, grad ? &gk : nullptr);
        const double coeff = lambda(static_cast<Eigen::Index>(k)) + rho * h;
        val += lambda(static_cast<Eigen::Index>(k)) * h + 0.5 * rho * h * h;
        if (grad) *grad += coeff * gk;
      }
      for (const auto& q : pb.inequalities) {
        const double qv = q(z, grad ? &gk : nullptr);
        if (barrier) {
          if (!(qv < 0.0)) return std::numeric_limits<double>::infinity();
          val -= tau * std::log(-qv);
          if (grad) *grad += (-tau / qv) * gk;
        } else if (qv > 0.0) {
          val += 0.5 * rho * qv * qv;
          if (grad) *grad += rho * qv * gk;
        }
      }
      // keep the iterate near the unit sphere; the terms above are scale free
      const double nn = z.squaredNorm() - 1.0;
      val += 0.25 * nn * nn;
      if (grad) *grad += nn * z;
      return val;
    };
    const BfgsResult br = bfgs_minimize(lagrangian, x, opt.gradient_tol, opt.max_inner);
    if (!std::isfinite(br.value)) break;
    x = br.x.normalized();
    const Evaluation e = evaluate(pb, x);
    for (std::size_t k = 0; k < ne; ++k) {
      lambda(static_cast<Eigen::Index>(k)) += rho * e.residuals(static_cast<Eigen::Index>(k));
    }
    if (!barrier && ni > 0 && e.max_inequality < 0.0) barrier = true;
    const bool eq_done = e.max_residual <= opt.feasibility_tol;
    const bool ineq_done = ni == 0 || (barrier && tau <= 1e-12) || (!barrier && e.max_inequality <= 0.0);
    if (eq_done && ineq_done && br.gradient_norm <= 10 * opt.gradient_tol) break;
    if (e.max_residual > 0.25 * previous) rho = std::min(rho * 10.0, 1e12);
    previous = e.max_residual;
    tau = std::max(tau * 0.1, 1e-14);
  }
  return x;
}

}  // namespace

PrimalResult solve_primal(const PrimalProblem& problem, const std::vector<RVec>& starts, const PrimalOptions& options) {
  PrimalResult best;
  double best_objective = -std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts.size(); ++s) {
    if (starts[s].norm() == 0.0) continue;
    const RVec x = run_from(problem, starts[s], options);
    const Evaluation e = evaluate(problem, x);
    const bool feasible = e.max_residual <= options.feasibility_tol * 10.0 && e.max_inequality <= 1e-12;
    const double badness = e.max_residual + std::max(e.max_inequality, 0.0);
    bool take = false;
    if (feasible) {
      take = !best.feasible || e.objective > best_objective;
    } else if (!best.feasible) {
      take = badness < best_residual;
    }
    if (take) {
      best.x = x;
      best.objective = e.objective;
      best.residuals = e.residuals;
      best.max_residual = e.max_residual;
      best.max_inequality = e.max_inequality;
      best.feasible = feasible;
      best.start_index = static_cast<int>(s);
      best_objective = e.objective;
      best_residual = badness;
    }
  }
  return best;
}

}  // namespace clusterfeed
