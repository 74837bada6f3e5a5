#include <CLI11.hpp>

#include <iostream>

#include "sentgrid/config.hpp"
#include "sentgrid/engine.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitBadConfig = 2;

sentgrid::config::ExperimentConfig load_or_exit(const std::string& path) {
  sentgrid::config::ConfigResult result = sentgrid::config::load_config(path);
  if (!result.ok()) {
    std::cerr << "config " << path << " is invalid:\n";
    for (const std::string& error : result.errors) std::cerr << "  - " << error << "\n";
    std::exit(kExitBadConfig);
  }
  return std::move(*result.config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentgrid: entity-sentiment prompting experiments over news datasets"};
  app.require_subcommand(1);

  std::string config_path;
  std::string run_dir;
  std::string output_dir;
  int parallelism = 0;
  long generation_budget = -1;
  bool verbose = false;

  CLI::App* validate = app.add_subcommand(
      "validate", "Check an experiment config and list every problem found");
  validate->add_option("--config", config_path, "experiment config file")->required();

  CLI::App* run = app.add_subcommand("run", "Execute the experiment grid of a config");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--parallelism", parallelism, "worker threads (overrides the config)");
  run->add_option("--output-dir", output_dir, "write artifacts here instead of the config's "
                                              "output_dir");
  run->add_option("--generation-budget", generation_budget,
                  "stop after this many backend calls (simulates an interrupted run)");
  run->add_flag("--verbose", verbose, "log cell progress to stderr");

  CLI::App* report = app.add_subcommand(
      "report", "Re-render the summary tables of a finished run directory");
  report->add_option("--run-dir", run_dir, "run directory produced by `run`")->required();

  CLI::App* transcripts = app.add_subcommand(
      "transcripts", "Print a human-readable listing of every prediction transcript");
  transcripts->add_option("--run-dir", run_dir, "run directory produced by `run`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  if (validate->parsed()) {
    load_or_exit(config_path);
    std::cout << "config ok: " << config_path << "\n";
    return kExitOk;
  }

  if (run->parsed()) {
    const sentgrid::config::ExperimentConfig cfg = load_or_exit(config_path);
    sentgrid::engine::RunOptions options;
    options.parallelism_override = parallelism;
    options.generation_budget = generation_budget;
    options.verbose = verbose;
    if (!output_dir.empty()) options.output_dir_override = output_dir;
    try {
      const sentgrid::engine::RunOutcome outcome = sentgrid::engine::run_experiment(cfg, options);
      std::cout << "run " << (outcome.exit_code == 0 ? "completed" : "incomplete") << ": "
                << outcome.backend_calls << " backend call(s), " << outcome.cache_hits
                << " cache hit(s), artifacts in " << outcome.output_dir.string() << "\n";
      if (outcome.interrupted) std::cout << "generation budget ran out; rerun to resume\n";
      for (const auto& failure : outcome.failed_cells) {
        std::cerr << "cell failed: " << failure.cell << ": " << failure.reason << "\n";
      }
      return outcome.exit_code;
    } catch (const std::exception& e) {
      std::cerr << "run failed: " << e.what() << "\n";
      return kExitRunFailure;
    }
  }

  if (report->parsed()) {
    return sentgrid::engine::render_reports(run_dir, std::cout) == 0 ? kExitOk : kExitRunFailure;
  }

  if (transcripts->parsed()) {
    try {
      std::cout << sentgrid::engine::dump_transcripts(run_dir);
      return kExitOk;
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitRunFailure;
    }
  }
  return kExitOk;
}
