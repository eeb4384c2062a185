#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/studies.hpp"
#include "fixtures.hpp"

using namespace clusterfeed;

namespace {

const ClusterPlan& plan4() {
  static const ClusterPlan p({0, 0, 1, 1});
  return p;
}

}  // namespace

TEST(Studies, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
               std::runtime_error);
}

TEST(Studies, PortModelsFollowInputOrder) {
  const std::vector<double> f = {780e6, 720e6};
  const auto models = port_models(fixtures::dipoles4(), f, {}, {}, 2);
  ASSERT_EQ(models.size(), 2u);
  EXPECT_EQ(models[0].frequency, 780e6);
  EXPECT_EQ((models[1].g0 - fixtures::dipoles4_at(720e6).g0).norm(), 0.0);
}

TEST(Studies, MonteCarloIsNormalizedAndDeterministic) {
  const PortModel& pm = fixtures::dipoles4_at(750e6);
  MonteCarloOptions o;
  o.samples = 3000;
  o.seed = 99;
  const MonteCarloResult a = monte_carlo(pm, plan4(), o);
  o.threads = 3;
  const MonteCarloResult b = monte_carlo(pm, plan4(), o);
  ASSERT_EQ(a.reports.size(), 3000u);
  ASSERT_EQ(b.reports.size(), a.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_NEAR(a.reports[i].incident_power, 1.0, 1e-12);
    EXPECT_EQ(a.reports[i].efficiency, b.reports[i].efficiency);
  }
  o.seed = 100;
  EXPECT_NE(monte_carlo(pm, plan4(), o).reports[0].efficiency, a.reports[0].efficiency);
}

TEST(Studies, MonteCarloRepairsSelfRatio) {
  const PortModel& pm = fixtures::dipoles4_at(735e6);
  MonteCarloOptions o;
  o.samples = 500;
  o.seed = 7;
  o.self_ratio = 10.0;
  const MonteCarloResult r = monte_carlo(pm, plan4(), o);
  EXPECT_EQ(r.summary.accepted, r.reports.size());
  for (const auto& rep : r.reports) {
    EXPECT_NEAR(rep.self_ratio(), 10.0, 1e-9);
    EXPECT_NEAR(rep.incident_power, 1.0, 1e-12);
  }
}

TEST(Studies, ParetoFrontSelection) {
  const std::vector<ParetoPoint> pts = {
      {0.2, 0.6, 2.0}, {0.0, 0.5, 1.0}, {0.1, 0.4, 1.0}, {0.2, 0.6, 1.5}, {0.3, 0.6, 1.0}, {0.4, 0.7, 1.0},
  };
  const auto front = pareto_front(pts);
  ASSERT_EQ(front.size(), 3u);
  EXPECT_EQ(front[0], 1u);
  EXPECT_EQ(front[1], 3u);
  EXPECT_EQ(front[2], 5u);
  EXPECT_TRUE(pareto_front({}).empty());
}

TEST(Studies, SweepFrontIsMonotoneAndContainsUncorrelatedSolve) {
  const PortModel& pm = fixtures::dipoles4_at(735e6);
  const auto grid = linear_grid(-0.4, 0.4, 5);
  const ParetoSweep s = pareto_sweep(pm, plan4(), 1.0, grid, grid, {}, 2);
  ASSERT_EQ(s.cells.size(), 25u);
  EXPECT_EQ(s.cells[1].beta, grid[0]);
  EXPECT_EQ(s.cells[1].gamma, grid[1]);
  ASSERT_FALSE(s.front.empty());
  double last_e = -1.0, last_eta = -1.0;
  for (std::size_t i : s.front) {
    const SolveResult& r = s.cells[i].result;
    EXPECT_GT(*r.ecc12(), last_e - 1e-15);
    EXPECT_GT(r.efficiency, last_eta);
    last_e = *r.ecc12();
    last_eta = r.efficiency;
  }
  const SolveResult& first = s.cells[s.front.front()].result;
  const SolveResult direct =
      solve_constrained(QcqpProblem::build(pm, plan4(), RatioTargets::two_cluster(1.0, 0.0, 0.0)));
  EXPECT_NEAR(s.cells[s.front.front()].beta, 0.0, 1e-15);
  EXPECT_NEAR(first.efficiency, direct.efficiency, 1e-9);
}

TEST(Studies, SolveTargetsDispatch) {
  const PortModel& pm = fixtures::dipoles4_at(750e6);
  EXPECT_NEAR(solve_targets(pm, plan4(), RatioTargets{}).efficiency, max_efficiency(pm, plan4()).efficiency, 1e-15);
  const SolveResult z = solve_targets(pm, plan4(), RatioTargets::ecc_capped(1.0, 0.0));
  EXPECT_LE(*z.ecc12(), 1e-10);
}

TEST(Studies, DetuningTracksAgreeAtCentre) {
  std::vector<PortModel> models;
  for (double f : {740e6, 745e6, 750e6, 755e6, 760e6}) models.push_back(fixtures::dipoles4_at(f));
  const DetuningStudy d = detuning_study(models, plan4(), RatioTargets::ecc_capped(1.0, 0.25), 750e6, {}, 1);
  ASSERT_EQ(d.optimal.size(), 5u);
  ASSERT_EQ(d.fixed.size(), 5u);
  EXPECT_NEAR(d.fixed[2].efficiency, d.optimal[2].efficiency, 1e-9);
  EXPECT_NEAR(incident_power(models[2], d.center_vector), 1.0, 1e-10);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(d.fixed[i].frequency, d.optimal[i].frequency);
    EXPECT_LE(*d.optimal[i].ecc, 0.25 + 1e-6);
  }
  EXPECT_THROW(detuning_study(models, plan4(), RatioTargets::ecc_capped(1.0, 0.25), 751e6), Error);
}

TEST(Studies, JumpTest) {
  std::vector<double> smooth;
  for (int i = 0; i < 20; ++i) smooth.push_back(0.5 + 0.01 * i + 0.001 * i * i);
  EXPECT_TRUE(is_continuous(smooth));
  EXPECT_TRUE(is_continuous(std::vector<double>(10, 0.3)));
  auto jumped = smooth;
  for (std::size_t i = 10; i < jumped.size(); ++i) jumped[i] += 0.5;
  EXPECT_FALSE(is_continuous(jumped));
  EXPECT_TRUE(is_continuous({1.0, 2.0}));
}

TEST(Studies, CappedFrontBeatsSamplesBelowEachPoint) {
  const PortModel& pm = fixtures::dipoles4_at(735e6);
  const CappedFront f = pareto_front_capped(pm, plan4(), 1.0, {0.0, 0.1, 0.3, 0.6});
  ASSERT_EQ(f.results.size(), 4u);
  ASSERT_FALSE(f.front.empty());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(*f.results[i].ecc12(), f.caps[i] + 1e-6);
  MonteCarloOptions o;
  o.samples = 5000;
  o.seed = 3;
  o.self_ratio = 1.0;
  for (const auto& r : monte_carlo(pm, plan4(), o).reports) {
    const auto e = r.envelope_correlation(0, 1);
    if (!e) continue;
    for (std::size_t k : f.front) {
      if (*e <= *f.results[k].ecc12()) EXPECT_LE(r.efficiency, f.results[k].efficiency);
    }
  }
}
