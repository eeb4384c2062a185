#include "clusterfeed/scenario/config.hpp"

#include <cmath>
#include <fstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/wire_scene.hpp"

namespace clusterfeed::scenario {

namespace {

struct KindName {
  AnalysisKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {AnalysisKind::kMaxEfficiency, "max-eff"},
    {AnalysisKind::kConstrained, "constrained"},
    {AnalysisKind::kEccCapped, "ecc-capped"},
    {AnalysisKind::kBetaGammaSweep, "beta-gamma-sweep"},
    {AnalysisKind::kPareto, "pareto"},
    {AnalysisKind::kMonteCarlo, "monte-carlo"},
    {AnalysisKind::kDetuning, "detuning"},
    {AnalysisKind::kFeasibleIntervals, "feasible-intervals"},
    {AnalysisKind::kPattern, "pattern"},
};

Grid read_grid(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string("'") + what + "' must be {start, stop, count}");
  Grid g{j.at("start").get<double>(), j.at("stop").get<double>(), j.value("count", 1)};
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw ValidationError(std::string(what) + " grid is not finite");
  if (g.count < 1) throw ValidationError(std::string(what) + " grid needs count >= 1");
  return g;
}

std::vector<double> read_frequency_list(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) return j.get<std::vector<double>>();
  return read_grid(j, "frequencies").values();
}

RatioTargets read_targets(const nlohmann::json& j) {
  RatioTargets t;
  if (!j.is_object()) throw ValidationError("'targets' must be an object");
  if (j.contains("R")) t.self_ratio = j.at("R").get<double>();
  if (j.contains("ecc_max")) t.ecc_cap = j.at("ecc_max").get<double>();
  if (j.contains("alpha")) {
    for (const auto& a : j.at("alpha")) {
      t.alpha.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
    }
  }
  if (j.contains("beta") || j.contains("gamma")) {
    if (!j.contains("beta") || !j.contains("gamma")) throw ValidationError("targets need both beta and gamma");
    t.pairs.push_back({0, 1, j.at("beta").get<double>(), j.at("gamma").get<double>()});
  }
  if (j.contains("pairs")) {
    for (const auto& pj : j.at("pairs")) {
      const auto cl = pj.at("clusters").get<std::vector<int>>();
      if (cl.size() != 2 || cl[0] < 1 || cl[1] <= cl[0]) {
        throw ValidationError("pair 'clusters' must be [m, n] with 1 <= m < n");
      }
      t.pairs.push_back({cl[0] - 1, cl[1] - 1, pj.at("beta").get<double>(), pj.at("gamma").get<double>()});
    }
  }
  return t;
}

bool has_ratio_constraint(const RatioTargets& t) {
  if (t.self_ratio || !t.pairs.empty() || t.ecc_cap) return true;
  for (const auto& a : t.alpha) {
    if (a) return true;
  }
  return false;
}

}  // namespace

std::string to_string(AnalysisKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

AnalysisKind analysis_kind_from_string(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  throw ValidationError("unknown analysis '" + name + "'");
}

std::vector<double> Grid::values() const { return linear_grid(start, stop, count); }

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError("run configuration must be an object");
  RunConfig c;
  c.echo = j;
  try {
    c.name = j.value("name", "run");
    const auto& scene = j.at("scene");
    if (scene.is_string()) {
      const std::filesystem::path p = base_dir / scene.get<std::string>();
      std::ifstream in(p);
      if (!in) throw ValidationError("cannot open scene file " + p.string());
      try {
        c.scene = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("scene file " + p.string() + ": " + e.what());
      }
      c.scene_reference = scene.get<std::string>();
    } else {
      c.scene = scene;
      c.scene_reference = "inline";
    }
    c.kind = analysis_kind_from_string(j.at("analysis").get<std::string>());
    if (j.contains("frequencies")) c.frequencies = read_frequency_list(j.at("frequencies"));
    const std::string rad = j.value("radiation", "resistance");
    if (rad == "resistance") c.radiation = RadiationSource::kResistance;
    else if (rad == "far-field") c.radiation = RadiationSource::kFarField;
    else throw ValidationError("radiation must be 'resistance' or 'far-field'");
    if (j.contains("targets")) c.targets = read_targets(j.at("targets"));
    if (j.contains("beta")) c.beta_grid = read_grid(j.at("beta"), "beta");
    if (j.contains("gamma")) c.gamma_grid = read_grid(j.at("gamma"), "gamma");
    if (j.contains("ratios")) c.ratios = j.at("ratios").get<std::vector<double>>();
    if (j.contains("ecc_caps")) c.ecc_caps = j.at("ecc_caps").get<std::vector<double>>();
    if (j.contains("samples")) {
      const auto n = j.at("samples").get<long long>();
      if (n < 0) throw ValidationError("samples must be non-negative");
      c.samples = static_cast<std::size_t>(n);
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("center_frequency")) c.center_frequency = j.at("center_frequency").get<double>();
    if (j.contains("pattern")) {
      const auto& pj = j.at("pattern");
      const std::string cut = pj.value("cut", "theta");
      if (cut == "theta") c.cut.kind = CutKind::kConstantTheta;
      else if (cut == "phi") c.cut.kind = CutKind::kConstantPhi;
      else throw ValidationError("pattern cut must be 'theta' or 'phi' (the angle held constant)");
      c.cut.fixed = pj.value("angle_deg", 90.0) * kPi / 180.0;
      c.cut.resolution = pj.value("resolution", 360);
    }
    c.output_dir = (base_dir / j.value("output", "out/" + c.name)).lexically_normal();
    c.plots = j.value("plots", true);
    c.threads = j.value("threads", 1);
    const std::string fmt = j.value("format", "csv");
    if (fmt == "csv") c.format = TableFormat::kCsv;
    else if (fmt == "json") c.format = TableFormat::kJson;
    else throw ValidationError("format must be 'csv' or 'json'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid run configuration: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open configuration " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("configuration " + file.string() + ": " + e.what());
  }
  return parse_run_config(j, file.parent_path());
}

void validate(const RunConfig& c) {
  for (double f : c.frequencies) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ValidationError("frequencies must be positive and finite");
  }
  if (c.threads < 0) throw ValidationError("threads must be >= 0");
  if (c.targets.self_ratio && !(*c.targets.self_ratio > 0.0)) throw ValidationError("R must be positive");
  const auto need_grids = [&] {
    if (!c.beta_grid || !c.gamma_grid) throw ValidationError(to_string(c.kind) + " needs 'beta' and 'gamma' grids");
  };
  switch (c.kind) {
    case AnalysisKind::kMaxEfficiency:
    case AnalysisKind::kFeasibleIntervals:
      break;
    case AnalysisKind::kConstrained:
      if (!has_ratio_constraint(c.targets)) throw ValidationError("constrained needs 'targets'");
      break;
    case AnalysisKind::kEccCapped:
      if (!c.targets.self_ratio) throw ValidationError("ecc-capped needs targets.R");
      if (!c.targets.ecc_cap && c.ecc_caps.empty()) throw ValidationError("ecc-capped needs targets.ecc_max or 'ecc_caps'");
      for (double e : c.ecc_caps) {
        if (!(e >= 0.0 && e < 1.0)) throw ValidationError("ECC caps must lie in [0, 1)");
      }
      if (c.targets.ecc_cap && !(*c.targets.ecc_cap >= 0.0 && *c.targets.ecc_cap < 1.0)) {
        throw ValidationError("ecc_max must lie in [0, 1)");
      }
      break;
    case AnalysisKind::kBetaGammaSweep:
      need_grids();
      if (!c.targets.self_ratio) throw ValidationError("beta-gamma-sweep needs targets.R");
      break;
    case AnalysisKind::kPareto:
      need_grids();
      if (!c.targets.self_ratio && c.ratios.empty()) throw ValidationError("pareto needs 'ratios' or targets.R");
      for (double r : c.ratios) {
        if (!(r > 0.0)) throw ValidationError("ratios must be positive");
      }
      if (c.samples > 0 && !c.seed) throw ValidationError("pareto with samples needs a seed");
      for (double e : c.ecc_caps) {
        if (!(e >= 0.0 && e < 1.0)) throw ValidationError("front caps must lie in [0, 1)");
      }
      break;
    case AnalysisKind::kMonteCarlo:
      if (c.samples < 1) throw ValidationError("monte-carlo needs samples >= 1");
      if (!c.seed) throw ValidationError("monte-carlo needs a seed");
      break;
    case AnalysisKind::kDetuning:
      if (!c.center_frequency) throw ValidationError("detuning needs 'center_frequency'");
      break;
    case AnalysisKind::kPattern:
      if (c.cut.resolution < 4) throw ValidationError("pattern resolution must be at least 4");
      break;
  }
}

}  // namespace clusterfeed::scenario
