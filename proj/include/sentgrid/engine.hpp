#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sentgrid/config.hpp"

namespace sentgrid::engine {

struct RunOptions {
  int parallelism_override = 0;  // > 0 replaces the config's worker count
  long generation_budget = -1;   // backend calls allowed before stopping; -1 = unlimited
  std::optional<std::filesystem::path> output_dir_override;
  bool verbose = false;
};

struct CellFailure {
  std::string cell;  // "run-1/dataset/backend/strategy"
  std::string reason;
};

struct RunOutcome {
  int exit_code = 0;       // 0 ok, 1 when cells failed or the run was cut short
  bool interrupted = false;  // the generation budget ran out
  std::vector<CellFailure> failed_cells;
  long backend_calls = 0;
  long cache_hits = 0;
  std::filesystem::path output_dir;
};

// Executes the full experiment grid: for every run seed, dataset, backend,
// and strategy, predicts each document, writes a transcript and a report
// into the output directory, then averages runs per cell and renders the
// per-dataset result tables. Reruns resume: completed cells (report already
// on disk) are skipped and previously cached generations are reused. A
// failing cell is recorded and the remaining cells still execute.
RunOutcome run_experiment(const config::ExperimentConfig& cfg, const RunOptions& options = {});

// Re-renders the per-dataset summary tables of a finished (or partial) run
// directory from its persisted reports and config snapshot, writing them to
// the summary/ subdirectory and to `out`. Returns a process exit code.
int render_reports(const std::filesystem::path& run_dir, std::ostream& out);

// Human-readable listing of every transcript record under the run
// directory, one block per (document x cell). Records that fail to decode
// are flagged and skipped; the listing continues. Throws
// std::runtime_error if the directory does not exist.
std::string dump_transcripts(const std::filesystem::path& run_dir);

}  // namespace sentgrid::engine
