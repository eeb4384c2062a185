#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/optimizer.hpp"
#include "clusterfeed/quadrature.hpp"
#include "clusterfeed/scenario/config.hpp"
#include "clusterfeed/scenario/pattern.hpp"
#include "clusterfeed/scenario/runner.hpp"
#include "clusterfeed/scenario/svg_plot.hpp"
#include "clusterfeed/scenario/table.hpp"
#include "fixtures.hpp"

using namespace clusterfeed;
using namespace clusterfeed::scenario;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CLUSTERFEED_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "clusterfeed_tests" / name;
  fs::remove_all(p);
  return p;
}

RunConfig inline_config(const std::string& json) {
  return parse_run_config(nlohmann::json::parse(json), kScenarios);
}

}  // namespace

TEST(Csv, DoublesRoundTripExactly) {
  Table t;
  t.columns = {"x", "n", "s", "empty"};
  const std::vector<double> xs = {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.8393095301, 1e-7};
  for (double x : xs) {
    auto& row = t.add_row();
    t.set(row, "x", x);
    t.set(row, "n", std::int64_t{42});
    t.set(row, "s", std::string("a, \"quoted\" cell"));
  }
  std::stringstream io;
  write_csv(io, t);
  const Table back = read_csv(io);
  ASSERT_EQ(back.columns, t.columns);
  ASSERT_EQ(back.rows.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(std::get<double>(back.rows[i][0]), xs[i]);
    EXPECT_EQ(std::get<std::int64_t>(back.rows[i][1]), 42);
    EXPECT_EQ(std::get<std::string>(back.rows[i][2]), "a, \"quoted\" cell");
    EXPECT_TRUE(std::holds_alternative<std::monostate>(back.rows[i][3]));
  }
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Config, KindsAndGrids) {
  EXPECT_EQ(analysis_kind_from_string("ecc-capped"), AnalysisKind::kEccCapped);
  EXPECT_EQ(to_string(AnalysisKind::kBetaGammaSweep), "beta-gamma-sweep");
  EXPECT_THROW(analysis_kind_from_string("nope"), ValidationError);
  const Grid g{-1.0, 1.0, 5};
  EXPECT_EQ(g.values(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
}

TEST(Config, BundledScenariosParseAndValidate) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    const auto name = e.path().filename().string();
    if (e.path().extension() != ".json" || name == "dipoles4.json" || name == "asym-wires.json") continue;
    const RunConfig c = load_run_config(e.path());
    EXPECT_NO_THROW(validate(c)) << name;
    EXPECT_FALSE(c.output_dir.empty()) << name;
    ++n;
  }
  EXPECT_GE(n, 10);
}

TEST(Config, MissingFieldsAreRejected) {
  EXPECT_THROW(validate(inline_config(R"({"scene": "dipoles4.json", "analysis": "monte-carlo", "samples": 10})")),
               ValidationError);
  EXPECT_THROW(validate(inline_config(R"({"scene": "dipoles4.json", "analysis": "constrained"})")), ValidationError);
  EXPECT_THROW(validate(inline_config(R"({"scene": "dipoles4.json", "analysis": "ecc-capped", "targets": {"R": 1}})")),
               ValidationError);
  EXPECT_THROW(validate(inline_config(R"({"scene": "dipoles4.json", "analysis": "detuning", "targets": {"R": 1}})")),
               ValidationError);
  EXPECT_THROW(inline_config(R"({"scene": "nowhere.json", "analysis": "max-eff"})"), ValidationError);
  EXPECT_THROW(inline_config(R"({"scene": "dipoles4.json", "analysis": "max-eff", "radiation": "x"})"),
               ValidationError);
  EXPECT_THROW(inline_config(R"({"scene": "dipoles4.json", "analysis": "constrained",
                                 "targets": {"pairs": [{"clusters": [2, 1], "beta": 0, "gamma": 0}]}})"),
               ValidationError);
}

TEST(Runner, RepeatedRunsAreByteIdentical) {
  const std::string json = R"({"name": "repeat", "scene": "dipoles4.json", "analysis": "constrained",
    "frequencies": [730e6, 770e6], "targets": {"R": 2, "beta": 0.1, "gamma": -0.05}})";
  RunConfig a = inline_config(json);
  RunConfig b = inline_config(json);
  a.output_dir = scratch("repeat_a");
  b.output_dir = scratch("repeat_b");
  const RunSummary sa = run(a);
  const RunSummary sb = run(b);
  EXPECT_EQ(sa.exit_code(), 0);
  EXPECT_EQ(sa.solves, 2u);
  ASSERT_EQ(sa.files.size(), sb.files.size());
  for (std::size_t i = 0; i < sa.files.size(); ++i) {
    EXPECT_EQ(sa.files[i].filename(), sb.files[i].filename());
    EXPECT_EQ(slurp(sa.files[i]), slurp(sb.files[i])) << sa.files[i];
  }
  EXPECT_TRUE(fs::exists(a.output_dir / "manifest.json"));
  EXPECT_EQ(slurp(a.output_dir / "manifest.json"), slurp(b.output_dir / "manifest.json"));
  std::ifstream in(a.output_dir / "results.csv");
  const Table t = read_csv(in);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_NE(std::find(t.columns.begin(), t.columns.end(), "efficiency"), t.columns.end());
}

TEST(Runner, InfeasibleOnlyRunExitsWithTwo) {
  RunConfig c = inline_config(R"({"scene": "dipoles4.json", "analysis": "constrained",
    "frequencies": [750e6], "targets": {"R": 1, "beta": 0.9, "gamma": 0}, "plots": false})");
  c.output_dir = scratch("infeasible");
  const RunSummary s = run(c);
  EXPECT_EQ(s.infeasible, 1u);
  EXPECT_EQ(s.exit_code(), 2);
}

TEST(Runner, JsonFormat) {
  RunConfig c = inline_config(R"({"scene": "dipoles4.json", "analysis": "feasible-intervals",
    "frequencies": [750e6], "format": "json"})");
  c.output_dir = scratch("json");
  run(c);
  const auto j = nlohmann::json::parse(slurp(c.output_dir / "results.json"));
  EXPECT_TRUE(j.is_object() || j.is_array());
}

TEST(Svg, PlotsAreWellFormed) {
  XYPlot p;
  p.title = "t";
  p.series.push_back(Series{"s", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.7}});
  const std::string xy = xy_plot_svg(p);
  EXPECT_NE(xy.find("<svg"), std::string::npos);
  EXPECT_NE(xy.find("</svg>"), std::string::npos);
  ContourPlot c;
  c.x = {0.0, 1.0, 2.0};
  c.y = {0.0, 1.0};
  c.values = RMat(2, 3);
  c.values << 0.0, 1.0, 2.0, 1.0, 2.0, 3.0;
  c.levels = {0.5, 1.5};
  const auto count = [](const std::string& svg) {
    std::size_t n = 0;
    for (auto p = svg.find("<line"); p != std::string::npos; p = svg.find("<line", p + 1)) ++n;
    return n;
  };
  const std::string with = contour_plot_svg(c);
  c.levels.clear();
  EXPECT_GT(count(with), count(contour_plot_svg(c)));
  EXPECT_NE(with.find("</svg>"), std::string::npos);
}

class PatternTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    mom_ = new MomOperator(assemble_impedance(fixtures::dipoles4(), 750e6));
  }
  static void TearDownTestSuite() { delete mom_; }
  static MomOperator* mom_;
};
MomOperator* PatternTest::mom_ = nullptr;

TEST_F(PatternTest, ClusterFieldsSumToTotal) {
  const ClusterPlan plan({0, 0, 1, 1});
  std::mt19937_64 rng(61);
  const CVec v = fixtures::random_feed(rng, 4);
  for (CutKind kind : {CutKind::kConstantTheta, CutKind::kConstantPhi}) {
    const PatternTable t = pattern_export(*mom_, fixtures::dipoles4(), plan, v, {kind, 0.7, 90});
    ASSERT_EQ(t.fields.size(), 3u);
    double peak = 0.0;
    for (const auto& f : t.fields[0]) peak = std::max(peak, std::sqrt(f.intensity()));
    for (std::size_t k = 0; k < t.angles.size(); ++k) {
      const cplx dt = t.fields[0][k].theta - t.fields[1][k].theta - t.fields[2][k].theta;
      const cplx dp = t.fields[0][k].phi - t.fields[1][k].phi - t.fields[2][k].phi;
      EXPECT_LE(std::abs(dt) + std::abs(dp), 1e-12 * peak);
    }
  }
}

TEST_F(PatternTest, SphereIntegralMatchesRadiatedPower) {
  const WireScene& s = fixtures::dipoles4();
  const ClusterPlan plan(s.cluster_of_port());
  const PortModel pm = reduce_to_ports(*mom_, s);
  std::mt19937_64 rng(67);
  const CVec v = fixtures::random_feed(rng, 4);
  const CVec current = feed_currents(*mom_, s, v);
  const GaussRule gl = gauss_legendre(40);
  const int nphi = 80;
  double integral = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double theta = std::acos(gl.nodes[i]);
    for (int j = 0; j < nphi; ++j) {
      const FarField f = far_field(*mom_, current, theta, 2.0 * kPi * j / nphi);
      integral += gl.weights[i] * (2.0 * kPi / nphi) * f.intensity();
    }
  }
  const double prad = integral / (2.0 * kFreeSpaceImpedance);
  EXPECT_NEAR(prad, radiated_power(pm, v), 1e-3 * radiated_power(pm, v));
}

TEST_F(PatternTest, UncorrelatedFeedHasOpposedLobes) {
  const PortModel pm = reduce_to_ports(*mom_, fixtures::dipoles4());
  const ClusterPlan plan({0, 0, 1, 1});
  const SolveResult r = solve_constrained(QcqpProblem::build(pm, plan, RatioTargets::two_cluster(1.0, 0.0, 0.0)));
  ASSERT_TRUE(r.feasible());
  const PatternTable t = pattern_export(*mom_, fixtures::dipoles4(), plan, r.v, {});
  const double d = std::abs(main_lobe(t, 1) - main_lobe(t, 2));
  const double sep = std::min(d, 2.0 * kPi - d) * 180.0 / kPi;
  EXPECT_GE(sep, 150.0);
}
