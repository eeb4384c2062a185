#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "clusterfeed/cluster_algebra.hpp"
#include "clusterfeed/feed_report.hpp"
#include "clusterfeed/port_model.hpp"
#include "clusterfeed/primal_solver.hpp"

namespace clusterfeed {

enum class SolveStatus { kDualOptimal, kPrimalStationary, kInfeasible };

std::string to_string(SolveStatus status);

/// Encodes (1/2) v^H (form - target * g0) v = 0.
struct QuadraticConstraint {
  std::string label;
  CMat form;
  double target = 0.0;
};

/// maximize Prad subject to Pin = 1 W and the homogenized ratio constraints.
struct QcqpProblem {
  PortModel port_model;
  ClusterPlan plan;
  RatioTargets targets;
  CMat objective;      // g0
  CMat normalization;  // Q0 = K^H K, v^H Q0 v = 2 Pin
  std::vector<QuadraticConstraint> equalities;
  std::optional<double> ecc_cap;

  static QcqpProblem build(const PortModel& pm, const ClusterPlan& plan, const RatioTargets& targets);

  /// form_k - target_k * g0
  CMat homogeneous(std::size_t k) const;
};

struct SolverOptions {
  double residual_tol = 1e-8;  // relative to Prad
  double gap_tol = 1e-6;       // relative duality gap
  double multiplier_box = 1e6;
  int max_dual_iterations = 200;
  int multistarts = 16;
  int elite_samples = 2000;
  std::uint64_t seed = 20240611;
  bool prescreen = true;
  PrimalOptions primal{};
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  CVec v;                 // scaled to Pin = 1 W (empty if nothing was found)
  double radiated_power = 0.0;
  double efficiency = 0.0;
  std::optional<FeedReport> report;
  RVec multipliers;
  RVec residuals;         // (1/2) v^H (H_k - c_k g0) v / Prad
  double dual_bound = 0.0;   // upper bound on the efficiency
  double duality_gap = 0.0;  // dual_bound - efficiency
  int dual_iterations = 0;
  std::vector<std::string> notes;

  bool feasible() const { return status != SolveStatus::kInfeasible; }
  /// E_12 of the report, if defined.
  std::optional<double> ecc12() const;
};

/// Largest generalized eigenvalue of (g0, K^H K).
SolveResult max_efficiency(const PortModel& pm, const ClusterPlan& plan);

/// Dual eigen-pencil method with primal fallback. The ECC cap, if any, is ignored.
SolveResult solve_constrained(const QcqpProblem& problem, const SolverOptions& options = {});

struct EccCapOptions {
  SolverOptions solver{};
  int angles = 16;                 // targets per interior isoline of the sweep
  int boundary_angles = 48;        // targets on the E = E_max isoline
  int refine_starts = 3;           // distinct sweep points refined by compass search
  int max_refine_evaluations = 60;  // compass solves per start
  double refine_tolerance = 1e-3;  // final compass step relative to E_max and to a full turn
  std::vector<std::pair<double, double>> warm_start;  // (beta, gamma) tried first, if inside the cap
};

/// Best constrained solve over the (beta, gamma) targets on and inside the
/// E = E_max isoline. Targets are addressed as (E, t): the point at angle t
/// of the E isoline. A sweep over nested isolines picks the starts of a
/// compass search in (E, t) with E clamped to [0, E_max].
/// Requires two clusters, R and the cap in the targets.
SolveResult solve_ecc_capped(const QcqpProblem& problem, const EccCapOptions& options = {});

/// solve_ecc_capped for several caps of one port model, in ascending order of
/// the cap with shared target solves; results follow the input order and
/// their efficiencies are nondecreasing in the cap.
std::vector<SolveResult> solve_ecc_caps(const PortModel& pm, const ClusterPlan& plan, double self_ratio,
                                        std::vector<double> caps, const EccCapOptions& options = {});

/// ECC levels swept by solve_ecc_capped for a given cap (always nested in the cap).
std::vector<double> ecc_levels(double e_max);

}  // namespace clusterfeed
