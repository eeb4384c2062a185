#include "clusterfeed/scenario/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/mom.hpp"
#include "clusterfeed/scenario/svg_plot.hpp"
#include "clusterfeed/scenario/table.hpp"
#include "clusterfeed/studies.hpp"
#include "clusterfeed/version.hpp"

namespace clusterfeed::scenario {

namespace {

std::string pair_tag(int m, int n) { return std::to_string(m + 1) + std::to_string(n + 1); }

Cell opt(const std::optional<double>& x) { return x ? Cell(*x) : Cell(std::monostate{}); }

void put_targets(Table& t, std::vector<Cell>& row, const RatioTargets& tg) {
  t.set(row, "target_R", opt(tg.self_ratio));
  std::optional<double> beta, gamma;
  if (!tg.pairs.empty()) {
    beta = tg.pairs.front().beta;
    gamma = tg.pairs.front().gamma;
  }
  t.set(row, "target_beta", opt(beta));
  t.set(row, "target_gamma", opt(gamma));
  t.set(row, "target_ecc_max", opt(tg.ecc_cap));
}

void put_report(Table& t, std::vector<Cell>& row, const std::optional<FeedReport>& r, int clusters) {
  const auto val = [&](auto f) -> Cell { return r ? Cell(f(*r)) : Cell(std::monostate{}); };
  t.set(row, "efficiency", val([](const FeedReport& x) { return x.efficiency; }));
  t.set(row, "radiated_power", val([](const FeedReport& x) { return x.radiated_power; }));
  t.set(row, "incident_power", val([](const FeedReport& x) { return x.incident_power; }));
  for (int m = 0; m < clusters; ++m) {
    t.set(row, "alpha_" + pair_tag(m, m), val([m](const FeedReport& x) { return x.alpha(m); }));
  }
  for (int m = 0; m < clusters; ++m) {
    for (int n = m + 1; n < clusters; ++n) {
      const std::string tag = pair_tag(m, n);
      t.set(row, "beta_" + tag, val([&](const FeedReport& x) { return x.beta(m, n); }));
      t.set(row, "gamma_" + tag, val([&](const FeedReport& x) { return x.gamma(m, n); }));
      t.set(row, "ecc_" + tag, r ? opt(r->envelope_correlation(m, n)) : Cell(std::monostate{}));
    }
  }
  if (clusters == 2) {
    t.set(row, "R_realized", r && r->alpha(0) > 0.0 ? Cell(r->self_ratio()) : Cell(std::monostate{}));
  }
}

void put_solve(Table& t, std::vector<Cell>& row, const SolveResult& s, int clusters) {
  t.set(row, "status", to_string(s.status));
  put_report(t, row, s.report, clusters);
  t.set(row, "dual_bound", s.dual_bound);
  t.set(row, "duality_gap", s.report ? Cell(s.duality_gap) : Cell(std::monostate{}));
  t.set(row, "max_residual", s.residuals.size() ? Cell(s.residuals.cwiseAbs().maxCoeff()) : Cell(std::monostate{}));
  std::string notes;
  for (const auto& n : s.notes) notes += (notes.empty() ? "" : "; ") + n;
  t.set(row, "notes", notes);
}

double number(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::nan("");
}

std::vector<double> column(Table& t, const std::string& name, const std::vector<std::size_t>& rows) {
  const std::size_t k = t.column_index(name);
  std::vector<double> out;
  for (std::size_t r : rows) out.push_back(number(t.rows[r][k]));
  return out;
}

std::vector<double> mhz(const std::vector<double>& f) {
  std::vector<double> out;
  for (double x : f) out.push_back(x / 1e6);
  return out;
}

class Writer {
 public:
  Writer(const RunConfig& c, RunSummary& s) : config_(c), summary_(s) {
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec || !std::filesystem::is_directory(c.output_dir)) {
      throw Error("cannot create output directory " + c.output_dir.string());
    }
  }

  void text(const std::string& file, const std::string& content) {
    const auto path = config_.output_dir / file;
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw Error("cannot write " + path.string());
    summary_.files.push_back(path);
  }

  void table(const std::string& stem, const Table& t) {
    std::ostringstream s;
    if (config_.format == TableFormat::kCsv) {
      write_csv(s, t);
      text(stem + ".csv", s.str());
    } else {
      s << table_to_json(t).dump(1) << "\n";
      text(stem + ".json", s.str());
    }
  }

  void plot(const std::string& file, const std::string& svg) {
    if (config_.plots) text(file, svg);
  }

 private:
  const RunConfig& config_;
  RunSummary& summary_;
};

struct Context {
  const RunConfig& config;
  WireScene scene;
  ClusterPlan plan;
  std::vector<double> frequencies;
  PortReductionOptions reduction;
  RunSummary& summary;
  Writer& writer;
  std::map<std::string, std::size_t> statuses;
  nlohmann::json extra = nlohmann::json::object();

  std::vector<PortModel> models() const {
    return port_models(scene, frequencies, reduction, {}, config.threads);
  }
  void count(const SolveResult& r) {
    ++summary.solves;
    if (!r.feasible()) ++summary.infeasible;
    ++statuses[to_string(r.status)];
  }
};

void track_plots(Context& cx, Table& t, const std::string& group_column, const std::string& title) {
  std::map<std::string, std::vector<std::size_t>> groups;
  const std::size_t g = t.column_index(group_column);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const Cell& c = t.rows[r][g];
    std::string key;
    if (const auto* s = std::get_if<std::string>(&c)) key = *s;
    else if (!std::holds_alternative<std::monostate>(c)) key = group_column + " = " + format_double(number(c));
    groups[key].push_back(r);
  }
  XYPlot eff{title + ": total efficiency", "frequency (MHz)", "efficiency", {}, std::nullopt, std::nullopt};
  XYPlot ecc{title + ": envelope correlation", "frequency (MHz)", "E_12", {}, std::nullopt, std::pair{0.0, 1.0}};
  XYPlot ratio{title + ": self-power ratio", "frequency (MHz)", "P_22 / P_11", {}, std::nullopt, std::nullopt};
  const bool two = cx.plan.clusters() == 2;
  for (auto& [key, rows] : groups) {
    const auto f = mhz(column(t, "frequency_hz", rows));
    eff.series.push_back({key, f, column(t, "efficiency", rows)});
    if (two) {
      ecc.series.push_back({key, f, column(t, "ecc_12", rows)});
      ratio.series.push_back({key, f, column(t, "R_realized", rows)});
    }
  }
  cx.writer.plot("efficiency.svg", xy_plot_svg(eff));
  if (two) {
    cx.writer.plot("ecc.svg", xy_plot_svg(ecc));
    cx.writer.plot("ratio.svg", xy_plot_svg(ratio));
  }
}

Table run_solves(Context& cx) {
  const auto models = cx.models();
  const RunConfig& c = cx.config;
  std::vector<double> caps;
  if (c.kind == AnalysisKind::kEccCapped) {
    caps = c.ecc_caps;
    if (caps.empty()) caps.push_back(*c.targets.ecc_cap);
    std::sort(caps.begin(), caps.end());
    if (cx.plan.clusters() != 2) throw ValidationError("ecc-capped runs need a two-cluster scene");
  }
  std::vector<std::vector<SolveResult>> results(models.size());
  parallel_for(models.size(), c.threads, [&](std::size_t i) {
    if (c.kind == AnalysisKind::kMaxEfficiency) {
      results[i].push_back(max_efficiency(models[i], cx.plan));
    } else if (c.kind == AnalysisKind::kConstrained) {
      RatioTargets t = c.targets;
      t.ecc_cap.reset();
      results[i].push_back(solve_targets(models[i], cx.plan, t));
    } else {
      results[i] = solve_ecc_caps(models[i], cx.plan, *c.targets.self_ratio, caps);
    }
  });
  Table t;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t k = 0; k < results[i].size(); ++k) {
      auto& row = t.add_row();
      t.set(row, "frequency_hz", models[i].frequency);
      RatioTargets tg = c.targets;
      if (c.kind == AnalysisKind::kMaxEfficiency) tg = {};
      if (c.kind == AnalysisKind::kConstrained) tg.ecc_cap.reset();
      if (!caps.empty()) tg = RatioTargets::ecc_capped(*c.targets.self_ratio, caps[k]);
      put_targets(t, row, tg);
      put_solve(t, row, results[i][k], cx.plan.clusters());
      cx.count(results[i][k]);
    }
  }
  if (!caps.empty()) {
    track_plots(cx, t, "target_ecc_max", cx.scene.name());
  } else {
    XYPlot eff{cx.scene.name() + ": total efficiency", "frequency (MHz)", "efficiency", {}, std::nullopt, std::nullopt};
    std::vector<std::size_t> all(t.rows.size());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
    eff.series.push_back({to_string(c.kind), mhz(column(t, "frequency_hz", all)), column(t, "efficiency", all)});
    if (cx.plan.clusters() == 2) {
      XYPlot ecc{cx.scene.name() + ": envelope correlation", "frequency (MHz)", "E_12", {}, std::nullopt, std::pair{0.0, 1.0}};
      ecc.series.push_back({to_string(c.kind), mhz(column(t, "frequency_hz", all)), column(t, "ecc_12", all)});
      cx.writer.plot("ecc.svg", xy_plot_svg(ecc));
    }
    cx.writer.plot("efficiency.svg", xy_plot_svg(eff));
  }
  return t;
}

std::vector<double> ratio_list(const RunConfig& c) {
  if (!c.ratios.empty()) return c.ratios;
  return {*c.targets.self_ratio};
}

std::string freq_tag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", f / 1e6);
  return std::string(buf) + "MHz";
}

Table run_grid(Context& cx) {
  const RunConfig& c = cx.config;
  if (cx.plan.clusters() != 2) throw ValidationError(to_string(c.kind) + " needs a two-cluster scene");
  const auto models = cx.models();
  const auto betas = c.beta_grid->values();
  const auto gammas = c.gamma_grid->values();
  const std::vector<double> ratios =
      c.kind == AnalysisKind::kPareto ? ratio_list(c) : std::vector<double>{*c.targets.self_ratio};
  Table t;
  Table samples;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const PortModel& pm = models[i];
    XYPlot front_plot{cx.scene.name() + " at " + freq_tag(pm.frequency) + ": efficiency vs correlation", "E_12",
                      "efficiency", {}, std::pair{0.0, 1.0}, std::nullopt};
    std::size_t dominated_total = 0;
    for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
      const double ratio = ratios[ri];
      const ParetoSweep sw = pareto_sweep(pm, cx.plan, ratio, betas, gammas, {}, c.threads);
      std::vector<char> on_front(sw.cells.size(), 0);
      for (std::size_t k : sw.front) on_front[k] = 1;
      Eigen::MatrixXd map(gammas.size(), betas.size());
      for (std::size_t k = 0; k < sw.cells.size(); ++k) {
        const SweepCell& cell = sw.cells[k];
        auto& row = t.add_row();
        t.set(row, "frequency_hz", pm.frequency);
        put_targets(t, row, RatioTargets::two_cluster(ratio, cell.beta, cell.gamma));
        put_solve(t, row, cell.result, 2);
        if (c.kind == AnalysisKind::kPareto) {
          t.set(row, "source", std::string("grid"));
          t.set(row, "grid_front", static_cast<std::int64_t>(on_front[k]));
        }
        cx.count(cell.result);
        map(static_cast<Eigen::Index>(k % gammas.size()), static_cast<Eigen::Index>(k / gammas.size())) =
            cell.result.feasible() ? cell.result.efficiency : std::nan("");
      }
      if (c.kind == AnalysisKind::kBetaGammaSweep) {
        ContourPlot cp{cx.scene.name() + " at " + freq_tag(pm.frequency) + ", R = " + format_double(ratio) +
                           ": efficiency over (beta, gamma)",
                       "beta", "gamma", betas, gammas, map, {0.2, 0.4, 0.6, 0.8, 0.9}, {}};
        for (double e : {0.1, 0.25, 0.5}) {
          const Ellipse el = ecc_isoline(e, ratio);
          Series s{"E = " + format_double(e), {}, {}};
          for (int a = 0; a <= 180; ++a) {
            const auto [b, g] = el.point(2.0 * kPi * a / 180.0);
            s.x.push_back(b);
            s.y.push_back(g);
          }
          cp.overlays.push_back(s);
        }
        cx.writer.plot("sweep_" + freq_tag(pm.frequency) + "_R" + format_double(ratio) + ".svg", contour_plot_svg(cp));
        continue;
      }
      EccCapOptions co;
      const CappedFront cf =
          pareto_front_capped(pm, cx.plan, ratio, c.ecc_caps.empty() ? default_front_caps() : c.ecc_caps, co);
      std::vector<char> capped_on_front(cf.results.size(), 0);
      for (std::size_t k : cf.front) capped_on_front[k] = 1;
      for (std::size_t k = 0; k < cf.results.size(); ++k) {
        auto& row = t.add_row();
        t.set(row, "frequency_hz", pm.frequency);
        put_targets(t, row, RatioTargets::ecc_capped(ratio, cf.caps[k]));
        put_solve(t, row, cf.results[k], 2);
        t.set(row, "source", std::string("cap"));
        t.set(row, "pareto", static_cast<std::int64_t>(capped_on_front[k]));
        cx.count(cf.results[k]);
      }
      std::vector<double> fe, fn, ge, gn;
      for (std::size_t k : cf.front) {
        fe.push_back(*cf.results[k].ecc12());
        fn.push_back(cf.results[k].efficiency);
      }
      for (std::size_t k : sw.front) {
        ge.push_back(*sw.cells[k].result.ecc12());
        gn.push_back(sw.cells[k].result.efficiency);
      }
      if (c.samples > 0) {
        MonteCarloOptions mo;
        mo.samples = c.samples;
        mo.seed = *c.seed + ri;
        mo.self_ratio = ratio;
        mo.threads = c.threads;
        const auto mc = monte_carlo(pm, cx.plan, mo);
        Series cloud{"samples R = " + format_double(ratio), {}, {}, true};
        std::size_t dominated = 0;
        for (std::size_t s = 0; s < mc.reports.size(); ++s) {
          const FeedReport& r = mc.reports[s];
          const auto e = r.envelope_correlation(0, 1);
          auto& row = samples.add_row();
          samples.set(row, "frequency_hz", pm.frequency);
          samples.set(row, "R", ratio);
          samples.set(row, "sample", static_cast<std::int64_t>(s));
          samples.set(row, "efficiency", r.efficiency);
          samples.set(row, "ecc_12", opt(e));
          if (!e) continue;
          cloud.x.push_back(*e);
          cloud.y.push_back(r.efficiency);
          for (std::size_t k = 0; k < fe.size(); ++k) {
            if (*e <= fe[k] && r.efficiency >= fn[k] && (*e < fe[k] || r.efficiency > fn[k])) {
              ++dominated;
              break;
            }
          }
        }
        dominated_total += dominated;
        for (const auto& w : mc.summary.warnings) cx.summary.warnings.push_back(w);
        front_plot.series.push_back(cloud);
      }
      front_plot.series.push_back({"grid front R = " + format_double(ratio), ge, gn});
      front_plot.series.push_back({"front R = " + format_double(ratio), fe, fn});
    }
    if (c.kind == AnalysisKind::kPareto) {
      cx.writer.plot("pareto_" + freq_tag(pm.frequency) + ".svg", xy_plot_svg(front_plot));
      if (c.samples > 0) cx.extra["samples_dominating_front"][freq_tag(pm.frequency)] = dominated_total;
    }
  }
  if (!samples.rows.empty()) cx.writer.table("samples", samples);
  return t;
}

Table run_monte_carlo(Context& cx) {
  const RunConfig& c = cx.config;
  const auto models = cx.models();
  Table t;
  for (std::size_t i = 0; i < models.size(); ++i) {
    MonteCarloOptions mo;
    mo.samples = c.samples;
    mo.seed = *c.seed;
    mo.self_ratio = c.targets.self_ratio;
    mo.threads = c.threads;
    const auto mc = monte_carlo(models[i], cx.plan, mo);
    for (const auto& w : mc.summary.warnings) cx.summary.warnings.push_back(freq_tag(models[i].frequency) + ": " + w);
    Series cloud{"samples", {}, {}, true};
    for (std::size_t s = 0; s < mc.reports.size(); ++s) {
      auto& row = t.add_row();
      t.set(row, "frequency_hz", models[i].frequency);
      t.set(row, "sample", static_cast<std::int64_t>(s));
      put_targets(t, row, c.targets);
      put_report(t, row, mc.reports[s], cx.plan.clusters());
      if (cx.plan.clusters() == 2) {
        if (const auto e = mc.reports[s].envelope_correlation(0, 1)) {
          cloud.x.push_back(*e);
          cloud.y.push_back(mc.reports[s].efficiency);
        }
      }
    }
    const SolveResult best = max_efficiency(models[i], cx.plan);
    Series top{"max efficiency", {0.0, 1.0}, {best.efficiency, best.efficiency}};
    if (cx.plan.clusters() == 2) {
      cx.writer.plot("samples_" + freq_tag(models[i].frequency) + ".svg",
                     xy_plot_svg({cx.scene.name() + " at " + freq_tag(models[i].frequency) + ": random feeds", "E_12",
                                  "efficiency", {cloud, top}, std::pair{0.0, 1.0}, std::nullopt}));
    }
  }
  return t;
}

Table run_detuning(Context& cx) {
  const RunConfig& c = cx.config;
  const auto models = cx.models();
  const DetuningStudy st = detuning_study(models, cx.plan, c.targets, *c.center_frequency, {}, c.threads);
  Table t;
  nlohmann::json cont;
  for (const auto* track : {&st.optimal, &st.fixed}) {
    const std::string name = track == &st.optimal ? "optimal" : "fixed";
    std::vector<double> eta, ecc, ratio;
    for (const TrackPoint& p : *track) {
      auto& row = t.add_row();
      t.set(row, "frequency_hz", p.frequency);
      t.set(row, "track", name);
      put_targets(t, row, c.targets);
      t.set(row, "status", to_string(p.status));
      put_report(t, row, p.report, cx.plan.clusters());
      if (track == &st.optimal) {
        ++cx.summary.solves;
        if (p.status == SolveStatus::kInfeasible) ++cx.summary.infeasible;
        ++cx.statuses[to_string(p.status)];
      }
      eta.push_back(p.efficiency);
      ecc.push_back(p.ecc.value_or(std::nan("")));
      ratio.push_back(p.self_ratio);
    }
    cont[name] = {{"efficiency", is_continuous(eta)}, {"ecc_12", is_continuous(ecc)}, {"R", is_continuous(ratio)}};
  }
  cx.extra["center_frequency_hz"] = st.center_frequency;
  cx.extra["continuity"] = cont;
  track_plots(cx, t, "track", cx.scene.name() + ", f_c = " + freq_tag(st.center_frequency));
  return t;
}

Table run_intervals(Context& cx) {
  const auto models = cx.models();
  Table t;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> curves;
  std::vector<double> f;
  for (const PortModel& pm : models) {
    const FeasibleIntervals iv = feasible_intervals(cx.plan, pm);
    f.push_back(pm.frequency / 1e6);
    const auto add = [&](const std::string& q, const RatioInterval& r) {
      auto& row = t.add_row();
      t.set(row, "frequency_hz", pm.frequency);
      t.set(row, "quantity", q);
      t.set(row, "min", r.min);
      t.set(row, "max", r.max);
      curves[q].first.push_back(r.min);
      curves[q].second.push_back(r.max);
    };
    for (int m = 0; m < cx.plan.clusters(); ++m) add("alpha_" + pair_tag(m, m), iv.alpha[m]);
    for (const auto& p : iv.pairs) {
      add("beta_" + pair_tag(p.m, p.n), p.beta);
      add("gamma_" + pair_tag(p.m, p.n), p.gamma);
    }
    for (const auto& w : iv.warnings) cx.summary.warnings.push_back(freq_tag(pm.frequency) + ": " + w);
  }
  XYPlot plot{cx.scene.name() + ": feasible ratio intervals", "frequency (MHz)", "ratio", {}, std::nullopt,
              std::nullopt};
  for (const auto& [q, mm] : curves) {
    if (q.rfind("alpha", 0) == 0) continue;
    plot.series.push_back({q + " min", f, mm.first});
    plot.series.push_back({q + " max", f, mm.second});
  }
  cx.writer.plot("intervals.svg", xy_plot_svg(plot));
  return t;
}

Table run_pattern(Context& cx) {
  const RunConfig& c = cx.config;
  Table t;
  for (double f : cx.frequencies) {
    const MomOperator mom = assemble_impedance(cx.scene, f);
    const PortModel pm = reduce_to_ports(mom, cx.scene, cx.reduction);
    const SolveResult r = solve_targets(pm, cx.plan, c.targets);
    cx.count(r);
    if (!r.feasible()) {
      auto& row = t.add_row();
      t.set(row, "frequency_hz", f);
      t.set(row, "status", to_string(r.status));
      continue;
    }
    const PatternTable pt = pattern_export(mom, cx.scene, cx.plan, r.v, c.cut, cx.reduction.zeta);
    PolarPlot polar{cx.scene.name() + " at " + freq_tag(f) + (c.cut.kind == CutKind::kConstantTheta ? ", theta = " : ", phi = ") +
                        format_double(c.cut.fixed * 180.0 / kPi) + " deg",
                    pt.angles, {}, 30.0};
    for (std::size_t ch = 0; ch < pt.fields.size(); ++ch) {
      std::vector<double> mag;
      for (std::size_t k = 0; k < pt.angles.size(); ++k) mag.push_back(pt.magnitude(ch, k));
      polar.traces.emplace_back(ch == 0 ? "total" : "cluster " + std::to_string(ch), mag);
    }
    for (std::size_t k = 0; k < pt.angles.size(); ++k) {
      auto& row = t.add_row();
      t.set(row, "frequency_hz", f);
      t.set(row, "status", to_string(r.status));
      t.set(row, "angle_deg", pt.angles[k] * 180.0 / kPi);
      for (std::size_t ch = 0; ch < pt.fields.size(); ++ch) {
        t.set(row, ch == 0 ? "total_abs_F" : "cluster_" + std::to_string(ch) + "_abs_F", pt.magnitude(ch, k));
      }
    }
    nlohmann::json lobes = nlohmann::json::object();
    for (std::size_t ch = 0; ch < pt.fields.size(); ++ch) {
      lobes[ch == 0 ? "total" : "cluster_" + std::to_string(ch)] = main_lobe(pt, ch) * 180.0 / kPi;
    }
    cx.extra["main_lobe_deg"][freq_tag(f)] = lobes;
    cx.writer.plot("pattern_" + freq_tag(f) + ".svg", polar_plot_svg(polar));
  }
  return t;
}

}  // namespace

RunSummary run(const RunConfig& config) {
  validate(config);
  RunSummary summary;
  WireScene scene = build_scene(config.scene);
  ClusterPlan plan(scene.cluster_of_port());
  Writer writer(config, summary);
  Context cx{config, std::move(scene), std::move(plan), {}, {}, summary, writer, {}, nlohmann::json::object()};
  cx.frequencies = config.frequencies.empty() ? cx.scene.frequencies() : config.frequencies;
  cx.reduction.source = config.radiation;

  Table table;
  switch (config.kind) {
    case AnalysisKind::kMaxEfficiency:
    case AnalysisKind::kConstrained:
    case AnalysisKind::kEccCapped:
      table = run_solves(cx);
      break;
    case AnalysisKind::kBetaGammaSweep:
    case AnalysisKind::kPareto:
      table = run_grid(cx);
      break;
    case AnalysisKind::kMonteCarlo:
      table = run_monte_carlo(cx);
      break;
    case AnalysisKind::kDetuning:
      table = run_detuning(cx);
      break;
    case AnalysisKind::kFeasibleIntervals:
      table = run_intervals(cx);
      break;
    case AnalysisKind::kPattern:
      table = run_pattern(cx);
      break;
  }
  writer.table("results", table);

  nlohmann::json manifest;
  manifest["tool"] = "clusterfeed";
  manifest["version"] = kVersion;
  manifest["analysis"] = to_string(config.kind);
  manifest["scene"] = {{"reference", config.scene_reference},
                       {"name", cx.scene.name()},
                       {"ports", cx.scene.port_count()},
                       {"clusters", cx.scene.cluster_count()},
                       {"basis_functions", cx.scene.basis_count()}};
  manifest["frequency_count"] = cx.frequencies.size();
  manifest["radiation"] = config.radiation == RadiationSource::kResistance ? "resistance" : "far-field";
  if (config.seed) manifest["seed"] = *config.seed;
  manifest["solves"] = summary.solves;
  manifest["infeasible"] = summary.infeasible;
  manifest["statuses"] = cx.statuses;
  manifest["warnings"] = summary.warnings;
  manifest["details"] = cx.extra;
  manifest["config"] = config.echo;
  std::vector<std::string> names;
  for (const auto& p : summary.files) names.push_back(p.filename().string());
  names.push_back("manifest.json");
  manifest["outputs"] = names;
  writer.text("manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace clusterfeed::scenario
