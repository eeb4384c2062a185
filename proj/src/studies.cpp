#include "clusterfeed/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/mom.hpp"

namespace clusterfeed {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<PortModel> port_models(const WireScene& scene, const std::vector<double>& frequencies,
                                   const PortReductionOptions& options, const AssemblyOptions& assembly,
                                   int threads) {
  std::vector<PortModel> out(frequencies.size());
  parallel_for(frequencies.size(), threads, [&](std::size_t i) {
    out[i] = reduce_to_ports(assemble_impedance(scene, frequencies[i], assembly), scene, options);
  });
  return out;
}

MonteCarloSummary monte_carlo_visit(const PortModel& pm, const ClusterPlan& plan, const MonteCarloOptions& options,
                                    const std::function<void(std::size_t, const FeedReport&)>& visit) {
  if (options.samples < 1) throw ValidationError("monte carlo: at least one sample");
  if (options.self_ratio) {
    if (plan.clusters() != 2) throw ValidationError("monte carlo: R repair needs two clusters");
    if (!(*options.self_ratio > 0.0)) throw DomainError("monte carlo: R must be positive");
  }
  const Eigen::Index n = pm.ports();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  std::vector<CVec> draws(options.samples);
  for (auto& v : draws) {
    v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      v(i) = cplx(re, im);
    }
  }

  MonteCarloSummary summary;
  summary.drawn = options.samples;
  std::vector<char> accepted(options.samples, 0);
  parallel_for(options.samples, options.threads, [&](std::size_t s) {
    CVec v = draws[s];
    if (options.self_ratio) {
      const CVec v1 = plan.isolate(v, 0);
      const CVec v2 = plan.isolate(v, 1);
      const double p11 = 0.5 * quadratic_form(pm.g0, v1);
      const double p22 = 0.5 * quadratic_form(pm.g0, v2);
      const double total = p11 + p22;
      if (!(p11 > kZeroPowerThreshold * total && p22 > kZeroPowerThreshold * total)) return;
      v = v1 + std::sqrt(*options.self_ratio * p11 / p22) * v2;
    }
    const double pin = incident_power(pm, v);
    if (!(pin > 0.0)) return;
    v /= std::sqrt(pin);
    accepted[s] = 1;
    visit(s, feed_report(pm, plan, v));
  });
  summary.accepted = static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), 1));
  if (summary.accepted * 100 < summary.drawn) {
    std::ostringstream msg;
    msg << "R repair failed for " << (summary.drawn - summary.accepted) << " of " << summary.drawn << " samples";
    summary.warnings.push_back(msg.str());
  }
  return summary;
}

MonteCarloResult monte_carlo(const PortModel& pm, const ClusterPlan& plan, const MonteCarloOptions& options) {
  std::vector<std::optional<FeedReport>> slots(options.samples);
  MonteCarloResult out;
  out.summary = monte_carlo_visit(pm, plan, options,
                                  [&](std::size_t i, const FeedReport& r) { slots[i] = r; });
  for (auto& s : slots) {
    if (s) out.reports.push_back(std::move(*s));
  }
  return out;
}

std::vector<std::size_t> pareto_front(const std::vector<ParetoPoint>& points) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    if (pa.ecc != pb.ecc) return pa.ecc < pb.ecc;
    if (pa.efficiency != pb.efficiency) return pa.efficiency > pb.efficiency;
    return pa.norm < pb.norm;
  });
  std::vector<std::size_t> front;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    if (points[i].efficiency > best) {
      front.push_back(i);
      best = points[i].efficiency;
    }
  }
  return front;
}

ParetoSweep pareto_sweep(const PortModel& pm, const ClusterPlan& plan, double self_ratio,
                         const std::vector<double>& beta_grid, const std::vector<double>& gamma_grid,
                         const SolverOptions& options, int threads) {
  if (plan.clusters() != 2) throw ValidationError("pareto sweep: two clusters");
  ParetoSweep sweep;
  sweep.self_ratio = self_ratio;
  sweep.beta_grid = beta_grid;
  sweep.gamma_grid = gamma_grid;
  for (double b : beta_grid) {
    for (double g : gamma_grid) sweep.cells.push_back({b, g, {}});
  }
  parallel_for(sweep.cells.size(), threads, [&](std::size_t i) {
    SweepCell& c = sweep.cells[i];
    if (c.beta >= 1.0) {
      c.result.notes.push_back("beta >= 1 leaves no power for the self terms");
      return;
    }
    const QcqpProblem p = QcqpProblem::build(pm, plan, RatioTargets::two_cluster(self_ratio, c.beta, c.gamma));
    c.result = solve_constrained(p, options);
  });
  std::vector<ParetoPoint> points;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < sweep.cells.size(); ++i) {
    const SolveResult& r = sweep.cells[i].result;
    const auto e = r.ecc12();
    if (!r.feasible() || !e) continue;
    points.push_back({*e, r.efficiency, r.v.norm()});
    owner.push_back(i);
  }
  for (std::size_t k : pareto_front(points)) sweep.front.push_back(owner[k]);
  return sweep;
}

std::vector<double> default_front_caps() {
  std::vector<double> caps;
  for (int i = 0; i < 40; ++i) caps.push_back(0.025 * i);
  return caps;
}

CappedFront pareto_front_capped(const PortModel& pm, const ClusterPlan& plan, double self_ratio,
                                std::vector<double> caps, const EccCapOptions& options) {
  CappedFront out;
  out.self_ratio = self_ratio;
  out.caps = caps;
  out.results = solve_ecc_caps(pm, plan, self_ratio, std::move(caps), options);
  std::vector<ParetoPoint> points;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const SolveResult& r = out.results[i];
    const auto e = r.ecc12();
    if (!r.feasible() || !e) continue;
    points.push_back({*e, r.efficiency, r.v.norm()});
    owner.push_back(i);
  }
  for (std::size_t k : pareto_front(points)) out.front.push_back(owner[k]);
  return out;
}

SolveResult solve_targets(const PortModel& pm, const ClusterPlan& plan, const RatioTargets& targets,
                          const EccCapOptions& options) {
  const bool any_alpha = std::any_of(targets.alpha.begin(), targets.alpha.end(),
                                     [](const auto& a) { return a.has_value(); });
  if (!targets.self_ratio && !any_alpha && targets.pairs.empty() && !targets.ecc_cap) {
    return max_efficiency(pm, plan);
  }
  const QcqpProblem p = QcqpProblem::build(pm, plan, targets);
  if (targets.ecc_cap) return solve_ecc_capped(p, options);
  return solve_constrained(p, options.solver);
}

namespace {

TrackPoint track_point(double f, SolveStatus status, const FeedReport& r) {
  TrackPoint t;
  t.frequency = f;
  t.status = status;
  t.efficiency = r.efficiency;
  if (r.clusters() >= 2) {
    t.ecc = r.envelope_correlation(0, 1);
    t.self_ratio = r.self_ratio();
  }
  t.report = r;
  return t;
}

}  // namespace

DetuningStudy detuning_study(const std::vector<PortModel>& models, const ClusterPlan& plan,
                             const RatioTargets& targets, double center_frequency,
                             const EccCapOptions& options, int threads) {
  std::size_t center = models.size();
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (std::abs(models[i].frequency - center_frequency) <= 1e-9 * center_frequency) center = i;
  }
  if (center == models.size()) throw ValidationError("detuning: f_c is not in the frequency list");

  DetuningStudy study;
  study.center_frequency = models[center].frequency;
  std::vector<SolveResult> solved(models.size());
  parallel_for(models.size(), threads, [&](std::size_t i) {
    solved[i] = solve_targets(models[i], plan, targets, options);
  });
  if (!solved[center].feasible()) throw DomainError("detuning: no feasible solution at f_c");
  study.center_vector = solved[center].v;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double f = models[i].frequency;
    if (solved[i].feasible()) {
      study.optimal.push_back(track_point(f, solved[i].status, *solved[i].report));
    } else {
      TrackPoint t;
      t.frequency = f;
      study.optimal.push_back(t);
    }
    // the fixed vector is a feed, not a solve; label it with the center status
    study.fixed.push_back(track_point(f, solved[center].status, feed_report(models[i], plan, study.center_vector)));
  }
  return study;
}

bool is_continuous(const std::vector<double>& values, double factor, double floor) {
  if (values.size() < 3) return true;
  std::vector<double> steps;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) steps.push_back(std::abs(values[i + 1] - values[i]));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::vector<double> near;
    for (std::size_t j = (i >= 3 ? i - 3 : 0); j <= std::min(steps.size() - 1, i + 3); ++j) {
      if (j != i) near.push_back(steps[j]);
    }
    std::nth_element(near.begin(), near.begin() + near.size() / 2, near.end());
    const double median = std::max(near[near.size() / 2], floor);
    if (!std::isfinite(steps[i]) || steps[i] > factor * median) return false;
  }
  return true;
}

}  // namespace clusterfeed
