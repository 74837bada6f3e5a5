#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sentgrid/labels.hpp"

namespace sentgrid::eval {

// What to do with documents whose completion never parsed to a label.
//   count_as_wrong   scored with zero credit: the document stays in its gold
//                    class's recall denominator but no cell is credited, so
//                    headline numbers can never benefit from failures.
//   exclude          dropped from the matrix entirely (failure still counted).
//   fallback_neutral scored as if the model had answered Neutral.
enum class FailurePolicy { CountAsWrong, Exclude, FallbackNeutral };

std::string_view to_string(FailurePolicy policy);
std::optional<FailurePolicy> parse_failure_policy(std::string_view name);

struct Prediction {
  SentimentLabel gold{};
  std::optional<SentimentLabel> predicted;  // empty = parse failure
};

// 3x3 counts, rows = gold, columns = predicted, in the fixed label order.
// Raw parse failures are tallied per gold class next to the matrix; the
// policy decides how they influence the derived metrics.
struct ConfusionMatrix {
  std::array<std::array<long, 3>, 3> cells{};
  std::array<long, 3> failures_by_gold{};
  FailurePolicy policy = FailurePolicy::CountAsWrong;

  long total_scored() const;    // sum of all cells
  long n_parse_failures() const;
  long n_docs() const;          // every prediction presented, failures included
  long row_total(int gold) const;  // recall denominator under the policy
  long col_total(int predicted) const;
};

ConfusionMatrix confusion(const std::vector<Prediction>& pairs,
                          FailurePolicy policy = FailurePolicy::CountAsWrong);

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Per-class precision/recall/F1 with every 0/0 defined as 0.
ClassMetrics per_class_metrics(const ConfusionMatrix& m, SentimentLabel label);

// Arithmetic mean of the three per-class F1 values, in [0, 1].
double macro_f1(const ConfusionMatrix& m);

double accuracy(const ConfusionMatrix& m);

struct EvalReport {
  std::string strategy;
  std::string backend_id;
  std::string dataset;
  std::uint64_t run_seed = 0;
  int n_runs = 1;  // > 1 once averaged
  long n_docs = 0;
  long n_parse_failures = 0;  // summed across runs when averaged
  std::array<ClassMetrics, 3> per_class{};
  double macro_f1 = 0;
  double accuracy = 0;
};

EvalReport make_report(const ConfusionMatrix& m, std::string strategy, std::string backend_id,
                       std::string dataset, std::uint64_t run_seed);

// Arithmetic mean of per-class metrics, macro-F1, and accuracy across runs
// of one experiment cell. Every report must agree on (strategy, backend,
// dataset) and n_docs; throws std::invalid_argument otherwise or on empty
// input.
EvalReport average_runs(const std::vector<EvalReport>& reports);

// The six result columns, grouped zero-shot then few-shot.
enum class TableColumn {
  ZeroShotStd = 0,
  ZeroShotTwoStage,
  ZeroShotSC,
  FewShotStd,
  FewShotCot,
  FewShotSC,
};
inline constexpr int kNumTableColumns = 6;

std::string_view to_string(TableColumn column);
std::optional<TableColumn> parse_table_column(std::string_view name);

struct TableRow {
  std::string name;
  std::array<std::optional<double>, kNumTableColumns> macro_f1;  // fractions in [0, 1]
  bool reference = false;  // quoted number, not produced by this harness
};

struct RenderedTable {
  std::string text;  // aligned human-readable table
  std::string tsv;   // one data row per line, tab-separated
};

// Renders macro-F1 percentages (2 decimals) for one dataset; missing cells
// show as an em dash in the text form and stay empty in the TSV.
RenderedTable render_table(const std::string& dataset, const std::vector<TableRow>& rows);

// 0.5494 -> "54.94"
std::string format_percent(double fraction);

}  // namespace sentgrid::eval
