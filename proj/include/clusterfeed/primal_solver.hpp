#pragma once

#include <functional>
#include <vector>

#include "clusterfeed/linalg.hpp"

namespace clusterfeed {

/// Value and (optionally) gradient of a smooth function on R^n.
using SmoothFunction = std::function<double(const RVec& x, RVec* grad)>;

struct BfgsResult {
  RVec x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Quasi-Newton minimization with backtracking line search. Points where the
/// function returns a non-finite value are treated as outside the domain.
BfgsResult bfgs_minimize(const SmoothFunction& f, RVec x0, double gradient_tol, int max_iterations);

/// Homogeneous problem on the unit sphere of R^n:
///   maximize   x^T A x / x^T x
///   subject to x^T B_k x / x^T x = 0
///              q_j(x) <= 0   (degree-0 homogeneous)
struct PrimalProblem {
  RMat objective;
  std::vector<RMat> equalities;
  std::vector<SmoothFunction> inequalities;
};

struct PrimalOptions {
  double feasibility_tol = 1e-11;  // on |x^T B_k x| / x^T x
  double gradient_tol = 1e-9;
  int max_outer = 40;
  int max_inner = 400;
};

struct PrimalResult {
  RVec x;              // unit norm
  double objective = 0.0;
  RVec residuals;      // x^T B_k x for unit x
  double max_residual = 0.0;
  double max_inequality = 0.0;  // max_j q_j(x)
  bool feasible = false;
  int start_index = -1;
};

/// Augmented Lagrangian on the equalities, log-barrier on the inequalities,
/// run from every start; returns the best feasible point, or the start with the
/// smallest residual when none is feasible.
PrimalResult solve_primal(const PrimalProblem& problem, const std::vector<RVec>& starts,
                          const PrimalOptions& options = {});

/// Normalized quadratic form r(x) = x^T M x / x^T x and its gradient.
double rayleigh(const RMat& m, const RVec& x, RVec* grad);

}  // namespace clusterfeed
