#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clusterfeed/scenario/config.hpp"

namespace clusterfeed::scenario {

struct RunSummary {
  std::size_t solves = 0;
  std::size_t infeasible = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;

  /// 0 on success, 2 when every solve of the run was infeasible.
  int exit_code() const { return solves > 0 && infeasible == solves ? 2 : 0; }
};

/// Runs one analysis and writes results.{csv|json}, manifest.json and the
/// SVG plots into config.output_dir. Throws Error subclasses on bad input or
/// unwritable output.
RunSummary run(const RunConfig& config);

}  // namespace clusterfeed::scenario
