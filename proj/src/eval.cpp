#include "sentgrid/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace sentgrid::eval {

std::string_view to_string(FailurePolicy policy) {
  switch (policy) {
    case FailurePolicy::CountAsWrong: return "count_as_wrong";
    case FailurePolicy::Exclude: return "exclude";
    case FailurePolicy::FallbackNeutral: return "fallback_neutral";
  }
  return "unknown";
}

std::optional<FailurePolicy> parse_failure_policy(std::string_view name) {
  if (name == "count_as_wrong") return FailurePolicy::CountAsWrong;
  if (name == "exclude") return FailurePolicy::Exclude;
  if (name == "fallback_neutral") return FailurePolicy::FallbackNeutral;
  return std::nullopt;
}

long ConfusionMatrix::total_scored() const {
  long total = 0;
  for (const auto& row : cells) total = std::accumulate(row.begin(), row.end(), total);
  return total;
}

long ConfusionMatrix::n_parse_failures() const {
  return std::accumulate(failures_by_gold.begin(), failures_by_gold.end(), 0L);
}

long ConfusionMatrix::n_docs() const {
  // Under fallback_neutral the failures already sit inside the cells.
  if (policy == FailurePolicy::FallbackNeutral) return total_scored();
  return total_scored() + n_parse_failures();
}

long ConfusionMatrix::row_total(int gold) const {
  long total = std::accumulate(cells[gold].begin(), cells[gold].end(), 0L);
  if (policy == FailurePolicy::CountAsWrong) total += failures_by_gold[gold];
  return total;
}

long ConfusionMatrix::col_total(int predicted) const {
  long total = 0;
  for (const auto& row : cells) total += row[predicted];
  return total;
}

ConfusionMatrix confusion(const std::vector<Prediction>& pairs, FailurePolicy policy) {
  ConfusionMatrix m;
  m.policy = policy;
  for (const Prediction& pair : pairs) {
    const int g = label_index(pair.gold);
    if (pair.predicted) {
      ++m.cells[g][label_index(*pair.predicted)];
    } else {
      ++m.failures_by_gold[g];
      if (policy == FailurePolicy::FallbackNeutral) {
        ++m.cells[g][label_index(SentimentLabel::Neutral)];
      }
    }
  }
  return m;
}

namespace {

double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

}  // namespace

ClassMetrics per_class_metrics(const ConfusionMatrix& m, SentimentLabel label) {
  const int i = label_index(label);
  ClassMetrics out;
  out.precision = ratio(m.cells[i][i], m.col_total(i));
  out.recall = ratio(m.cells[i][i], m.row_total(i));
  const double pr = out.precision + out.recall;
  out.f1 = pr == 0 ? 0.0 : 2 * out.precision * out.recall / pr;
  return out;
}

double macro_f1(const ConfusionMatrix& m) {
  double sum = 0;
  for (SentimentLabel label : kAllLabels) sum += per_class_metrics(m, label).f1;
  return sum / 3.0;
}

double accuracy(const ConfusionMatrix& m) {
  long correct = 0;
  for (int i = 0; i < 3; ++i) correct += m.cells[i][i];
  long total = m.total_scored();
  if (m.policy == FailurePolicy::CountAsWrong) total += m.n_parse_failures();
  return ratio(correct, total);
}

EvalReport make_report(const ConfusionMatrix& m, std::string strategy, std::string backend_id,
                       std::string dataset, std::uint64_t run_seed) {
  EvalReport report;
  report.strategy = std::move(strategy);
  report.backend_id = std::move(backend_id);
  report.dataset = std::move(dataset);
  report.run_seed = run_seed;
  report.n_docs = m.n_docs();
  report.n_parse_failures = m.n_parse_failures();
  for (SentimentLabel label : kAllLabels) {
    report.per_class[label_index(label)] = per_class_metrics(m, label);
  }
  report.macro_f1 = macro_f1(m);
  report.accuracy = accuracy(m);
  return report;
}

EvalReport average_runs(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("cannot average zero reports");
  const EvalReport& first = reports.front();
  for (const EvalReport& r : reports) {
    if (r.strategy != first.strategy || r.backend_id != first.backend_id ||
        r.dataset != first.dataset) {
      throw std::invalid_argument(
          "refusing to average across different cells: (" + first.strategy + ", " +
          first.backend_id + ", " + first.dataset + ") vs (" + r.strategy + ", " + r.backend_id +
          ", " + r.dataset + ")");
    }
    if (r.n_docs != first.n_docs) {
      throw std::invalid_argument("runs scored different document counts: " +
                                  std::to_string(first.n_docs) + " vs " +
                                  std::to_string(r.n_docs));
    }
  }

  EvalReport avg;
  avg.strategy = first.strategy;
  avg.backend_id = first.backend_id;
  avg.dataset = first.dataset;
  avg.run_seed = 0;
  avg.n_runs = static_cast<int>(reports.size());
  avg.n_docs = first.n_docs;
  const double n = static_cast<double>(reports.size());
  for (const EvalReport& r : reports) {
    avg.n_parse_failures += r.n_parse_failures;
    avg.macro_f1 += r.macro_f1 / n;
    avg.accuracy += r.accuracy / n;
    for (int i = 0; i < 3; ++i) {
      avg.per_class[i].precision += r.per_class[i].precision / n;
      avg.per_class[i].recall += r.per_class[i].recall / n;
      avg.per_class[i].f1 += r.per_class[i].f1 / n;
    }
  }
  return avg;
}

std::string_view to_string(TableColumn column) {
  switch (column) {
    case TableColumn::ZeroShotStd: return "zero_shot_std";
    case TableColumn::ZeroShotTwoStage: return "zero_shot_two_stage";
    case TableColumn::ZeroShotSC: return "zero_shot_sc";
    case TableColumn::FewShotStd: return "few_shot_std";
    case TableColumn::FewShotCot: return "few_shot_cot";
    case TableColumn::FewShotSC: return "few_shot_sc";
  }
  return "unknown";
}

std::optional<TableColumn> parse_table_column(std::string_view name) {
  for (int i = 0; i < kNumTableColumns; ++i) {
    const auto column = static_cast<TableColumn>(i);
    if (name == to_string(column)) return column;
  }
  return std::nullopt;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

RenderedTable render_table(const std::string& dataset, const std::vector<TableRow>& rows) {
  static constexpr const char* kDash = "—";
  static constexpr const char* kShortHeads[kNumTableColumns] = {"Std",  "2-Stage", "SC",
                                                                "Std",  "CoT",     "SC"};

  std::size_t name_width = std::string("Model").size();
  for (const TableRow& row : rows) {
    std::size_t w = row.name.size() + (row.reference ? std::string(" (reference)").size() : 0);
    name_width = std::max(name_width, w);
  }
  const int cell = 9;

  auto pad_left = [](const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
  };
  auto pad_right = [](const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
  };

  std::string text = "Macro-F1 (%) — " + dataset + "\n\n";
  // Group header: the two strategy families, centered over their columns.
  const std::size_t group_width = 3 * cell;
  auto center = [](const std::string& s, std::size_t width) {
    if (s.size() >= width) return s;
    const std::size_t left = (width - s.size()) / 2;
    return std::string(left, ' ') + s + std::string(width - s.size() - left, ' ');
  };
  text += std::string(name_width, ' ') + center("Zero-shot", group_width) +
          center("Few-shot", group_width) + "\n";
  text += pad_right("Model", name_width);
  for (int i = 0; i < kNumTableColumns; ++i) text += pad_left(kShortHeads[i], cell);
  text += "\n" + std::string(name_width + kNumTableColumns * cell, '-') + "\n";

  for (const TableRow& row : rows) {
    std::string name = row.name;
    if (row.reference) name += " (reference)";
    text += pad_right(name, name_width);
    for (int i = 0; i < kNumTableColumns; ++i) {
      const auto& v = row.macro_f1[i];
      // The em dash is three bytes but one column; pad by display width.
      if (v) {
        text += pad_left(format_percent(*v), cell);
      } else {
        text += std::string(cell - 1, ' ') + kDash;
      }
    }
    text += "\n";
  }

  std::string tsv = "dataset\tmodel\treference";
  for (int i = 0; i < kNumTableColumns; ++i) {
    tsv += "\t" + std::string(to_string(static_cast<TableColumn>(i)));
  }
  tsv += "\n";
  for (const TableRow& row : rows) {
    tsv += dataset + "\t" + row.name + "\t" + (row.reference ? "yes" : "no");
    for (int i = 0; i < kNumTableColumns; ++i) {
      tsv += "\t";
      if (row.macro_f1[i]) tsv += format_percent(*row.macro_f1[i]);
    }
    tsv += "\n";
  }
  return {text, tsv};
}

}  // namespace sentgrid::eval
