#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/scenario/runner.hpp"
#include "clusterfeed/version.hpp"

int main(int argc, char** argv) {
  using namespace clusterfeed;
  CLI::App app{"Cluster feeding optimization for multi-port wire antennas"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format;
  bool no_plots = false;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the analysis described by a configuration file");
  run_cmd->add_option("config", config_file, "JSON run configuration")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory (overrides the configuration)");
  run_cmd->add_option("--seed", seed, "Random seed (overrides the configuration)");
  run_cmd->add_option("--threads", threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--format", format, "Results table format")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_flag("--no-plots", no_plots, "Skip SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    scenario::RunConfig config = scenario::load_run_config(config_file);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (format == "csv") config.format = scenario::TableFormat::kCsv;
    if (format == "json") config.format = scenario::TableFormat::kJson;
    if (no_plots) config.plots = false;
    const scenario::RunSummary summary = scenario::run(config);
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << scenario::to_string(config.kind) << ": " << summary.solves << " solves, " << summary.infeasible
              << " infeasible; wrote " << summary.files.size() << " files to " << config.output_dir.string() << "\n";
    if (summary.exit_code() == 2) std::cerr << "every solve was infeasible\n";
    return summary.exit_code();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
