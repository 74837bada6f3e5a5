#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentgrid/eval.hpp"
#include "sentgrid/prompting.hpp"
#include "sentgrid/sampling.hpp"

namespace sentgrid::config {

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  std::string format;  // "persent" | "wpan"
  std::string split;   // persent only: train | dev | test-std | test-freq
};

struct BackendSpec {
  std::string id;
  std::filesystem::path script;  // mock backends: completion script path
  std::string endpoint;          // http backends: chat-completions URL
  std::string model;
  std::string auth_env;  // name of the env var holding the bearer token
  int timeout_s = 60;

  bool is_mock() const { return !script.empty(); }
};

struct StrategySpec {
  std::string name;
  prompting::Strategy strategy;
  gen::SamplingConfig sampling;  // seed is filled per run, not from config
  eval::TableColumn table_column{};
};

struct ExemplarSpec {
  int n = 3;
  std::uint64_t seed = 0;  // combined with the run seed for per-run draws
  std::filesystem::path train_path;
  std::string train_split = "train";
  std::filesystem::path rationale_table;  // CoT rationales, exemplar id -> text
  bool stratified = true;
};

// A quoted result row (e.g. a fine-tuned classifier from prior work),
// rendered into tables but never computed. Values are percentages.
struct BaselineSpec {
  std::string name;
  std::string provenance;
  std::map<std::string, double> values;  // dataset name -> macro-F1 %
};

struct ExperimentConfig {
  std::filesystem::path source_path;  // the config file itself
  std::filesystem::path base_dir;     // directory of the config file
  std::filesystem::path output_dir = "out";
  std::filesystem::path templates_dir;
  int n_runs = 3;
  std::vector<std::uint64_t> seeds;  // length n_runs
  int parallelism = 4;
  long char_budget = 12000;
  eval::FailurePolicy failure_policy = eval::FailurePolicy::CountAsWrong;
  std::vector<DatasetSpec> datasets;
  std::vector<BackendSpec> backends;
  std::vector<StrategySpec> strategies;
  ExemplarSpec exemplars;
  std::vector<BaselineSpec> baselines;
};

// Either a fully resolved config or the complete list of what is wrong with
// the file — validation reports every problem it can find, not just the
// first.
struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value(); }
};

// Parses and validates a JSON experiment config. Unknown keys are rejected
// at every level (typo safety); relative paths are resolved against the
// config file's directory; referenced files must exist. Defaults: n_runs 3,
// seeds 1..n_runs, parallelism 4, char_budget 12000, failure policy
// count_as_wrong.
ConfigResult load_config(const std::filesystem::path& path);

}  // namespace sentgrid::config
