#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clusterfeed/feed_report.hpp"
#include "clusterfeed/optimizer.hpp"
#include "clusterfeed/port_model.hpp"
#include "clusterfeed/wire_scene.hpp"

namespace clusterfeed {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware).
/// fn must only touch state owned by index i.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// One MoM assembly and port reduction per frequency, in input order.
std::vector<PortModel> port_models(const WireScene& scene, const std::vector<double>& frequencies,
                                   const PortReductionOptions& options = {}, const AssemblyOptions& assembly = {},
                                   int threads = 1);

struct MonteCarloOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::optional<double> self_ratio;  // repair every sample to P_22 = R P_11 (two clusters)
  int threads = 1;
};

struct MonteCarloSummary {
  std::size_t drawn = 0;
  std::size_t accepted = 0;
  std::vector<std::string> warnings;
};

/// Complex-normal feeds rescaled to Pin = 1 W. Samples are drawn serially from
/// one generator, so the visited sequence is identical for any thread count.
/// visit(index, report) may be called concurrently for different indices.
MonteCarloSummary monte_carlo_visit(const PortModel& pm, const ClusterPlan& plan, const MonteCarloOptions& options,
                                    const std::function<void(std::size_t, const FeedReport&)>& visit);

struct MonteCarloResult {
  std::vector<FeedReport> reports;  // accepted samples in draw order
  MonteCarloSummary summary;
};

MonteCarloResult monte_carlo(const PortModel& pm, const ClusterPlan& plan, const MonteCarloOptions& options);

struct ParetoPoint {
  double ecc = 0.0;
  double efficiency = 0.0;
  double norm = 0.0;  // ||v||, tie breaker
};

/// Indices of the non-dominated points, sorted by increasing ECC. Ties go to
/// lower ECC, then lower ||v||.
std::vector<std::size_t> pareto_front(const std::vector<ParetoPoint>& points);

struct SweepCell {
  double beta = 0.0;
  double gamma = 0.0;
  SolveResult result;
};

struct ParetoSweep {
  double self_ratio = 1.0;
  std::vector<double> beta_grid;
  std::vector<double> gamma_grid;
  std::vector<SweepCell> cells;  // beta-major
  std::vector<std::size_t> front;  // non-dominated cells of the grid, indices into cells
};

ParetoSweep pareto_sweep(const PortModel& pm, const ClusterPlan& plan, double self_ratio,
                         const std::vector<double>& beta_grid, const std::vector<double>& gamma_grid,
                         const SolverOptions& options = {}, int threads = 1);

/// Caps 0, 0.025, ..., 0.975.
std::vector<double> default_front_caps();

struct CappedFront {
  double self_ratio = 1.0;
  std::vector<double> caps;
  std::vector<SolveResult> results;  // one ECC-capped solve per cap
  std::vector<std::size_t> front;    // non-dominated results by realized (E_12, efficiency)
};

/// Front of max efficiency under E_12 <= cap. Unlike a grid front, no feed
/// with E_12 below a front point's realized value can do better unless the
/// capped solve missed its optimum.
CappedFront pareto_front_capped(const PortModel& pm, const ClusterPlan& plan, double self_ratio,
                                std::vector<double> caps = default_front_caps(), const EccCapOptions& options = {});

struct TrackPoint {
  double frequency = 0.0;
  SolveStatus status = SolveStatus::kInfeasible;
  double efficiency = 0.0;
  std::optional<double> ecc;
  double self_ratio = 0.0;
  std::optional<FeedReport> report;
};

struct DetuningStudy {
  double center_frequency = 0.0;
  CVec center_vector;
  std::vector<TrackPoint> optimal;  // solved at every frequency
  std::vector<TrackPoint> fixed;    // center vector evaluated at every frequency
};

/// Targets with an ECC cap go through solve_ecc_capped, other targets through
/// solve_constrained, empty targets through max_efficiency.
SolveResult solve_targets(const PortModel& pm, const ClusterPlan& plan, const RatioTargets& targets,
                          const EccCapOptions& options = {});

DetuningStudy detuning_study(const std::vector<PortModel>& models, const ClusterPlan& plan,
                             const RatioTargets& targets, double center_frequency,
                             const EccCapOptions& options = {}, int threads = 1);

/// True if no step |x[i+1] - x[i]| exceeds factor times the median of the
/// neighbouring steps (three on each side), with the median floored at `floor`.
bool is_continuous(const std::vector<double>& values, double factor = 10.0, double floor = 1e-6);

}  // namespace clusterfeed
