#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterfeed/cluster_algebra.hpp"
#include "clusterfeed/port_model.hpp"
#include "clusterfeed/scenario/pattern.hpp"

namespace clusterfeed::scenario {

enum class AnalysisKind {
  kMaxEfficiency,
  kConstrained,
  kEccCapped,
  kBetaGammaSweep,
  kPareto,
  kMonteCarlo,
  kDetuning,
  kFeasibleIntervals,
  kPattern,
};

std::string to_string(AnalysisKind kind);
AnalysisKind analysis_kind_from_string(const std::string& name);

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

enum class TableFormat { kCsv, kJson };

struct RunConfig {
  std::string name;
  nlohmann::json scene;          // resolved scene description
  std::string scene_reference;   // file name or "inline"
  AnalysisKind kind = AnalysisKind::kMaxEfficiency;
  std::vector<double> frequencies;  // empty: the scene band
  RadiationSource radiation = RadiationSource::kResistance;
  RatioTargets targets;
  std::optional<Grid> beta_grid;
  std::optional<Grid> gamma_grid;
  std::vector<double> ratios;  // R values of a pareto run
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> center_frequency;
  std::vector<double> ecc_caps;  // ecc-capped runs: one column of results per cap
  PatternCut cut;
  std::filesystem::path output_dir;
  bool plots = true;
  int threads = 1;
  TableFormat format = TableFormat::kCsv;
  nlohmann::json echo;  // the configuration as read
};

/// Relative paths (scene file, output directory) resolve against base_dir.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& file);

/// Throws ValidationError when kind-specific fields are missing or malformed.
void validate(const RunConfig& config);

}  // namespace clusterfeed::scenario
