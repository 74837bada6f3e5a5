#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sentgrid/backend.hpp"
#include "sentgrid/config.hpp"
#include "sentgrid/consistency.hpp"
#include "sentgrid/corpus.hpp"
#include "sentgrid/digest.hpp"
#include "sentgrid/engine.hpp"
#include "sentgrid/eval.hpp"
#include "sentgrid/parse.hpp"
#include "sentgrid/prompting.hpp"

namespace py = pybind11;
using namespace sentgrid;

namespace {

SentimentLabel label_from_string(const std::string& name) {
  const auto label = parse_label(name);
  if (!label) throw py::value_error("not a sentiment label: " + name);
  return *label;
}

py::dict answer_to_dict(const ParsedAnswer& answer) {
  py::dict d;
  if (answer.label) d["label"] = std::string(to_string(*answer.label));
  if (answer.rationale) d["rationale"] = *answer.rationale;
  if (answer.failure) d["failure"] = std::string(to_string(*answer.failure));
  return d;
}

corpus::PersentSplit split_from_string(const std::string& name) {
  if (name == "train") return corpus::PersentSplit::Train;
  if (name == "dev") return corpus::PersentSplit::Dev;
  if (name == "test-std") return corpus::PersentSplit::TestStd;
  if (name == "test-freq") return corpus::PersentSplit::TestFreq;
  throw py::value_error("not a persent split: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entity-sentiment prompting experiment harness (C++ core)";

  m.def("sha256_hex", [](const std::string& data) { return sha256_hex(data); },
        py::arg("data"), "Hex SHA-256 of a byte string");

  m.def(
      "bucket_score",
      [](double score) -> std::optional<std::string> {
        const auto label = corpus::bucket_score(score);
        if (!label) return std::nullopt;
        return std::string(to_string(*label));
      },
      py::arg("score"),
      "Bucket an entity sentiment score in [-1, 1] into Positive/Neutral/Negative; "
      "None when the score falls between the class ranges");

  m.def(
      "extract_label", [](const std::string& text) { return answer_to_dict(extract_label(text)); },
      py::arg("text"), "Parse a completion into {'label': ...} or {'failure': ...}");

  m.def(
      "extract_rationale",
      [](const std::string& text, const std::string& echo_line) {
        return extract_rationale(text, echo_line);
      },
      py::arg("text"), py::arg("echo_line") = std::string(),
      "Trim a stage-1 completion, dropping leading echoes of the instruction line");

  m.def(
      "majority_vote",
      [](const std::vector<std::string>& labels, const std::optional<std::string>& fallback) {
        std::vector<SentimentLabel> parsed;
        parsed.reserve(labels.size());
        for (const std::string& name : labels) parsed.push_back(label_from_string(name));
        std::optional<SentimentLabel> fb;
        if (fallback) fb = label_from_string(*fallback);
        const consistency::VoteResult vote = consistency::majority_vote(parsed, fb);
        py::dict counts;
        for (SentimentLabel label : kAllLabels) {
          counts[py::str(std::string(to_string(label)))] = vote.counts[label_index(label)];
        }
        py::dict d;
        d["winner"] = std::string(to_string(vote.winner));
        d["counts"] = counts;
        d["n_valid"] = vote.n_valid;
        d["n_failed"] = vote.n_failed;
        d["tie_broken"] = vote.tie_broken;
        return d;
      },
      py::arg("labels"), py::arg("greedy_fallback") = std::nullopt,
      "Majority vote with the documented tie-break rule");

  m.def(
      "evaluate",
      [](const std::vector<std::pair<std::string, std::optional<std::string>>>& pairs,
         const std::string& policy_name) {
        const auto policy = eval::parse_failure_policy(policy_name);
        if (!policy) throw py::value_error("not a failure policy: " + policy_name);
        std::vector<eval::Prediction> predictions;
        predictions.reserve(pairs.size());
        for (const auto& [gold, predicted] : pairs) {
          eval::Prediction p;
          p.gold = label_from_string(gold);
          if (predicted) p.predicted = label_from_string(*predicted);
          predictions.push_back(p);
        }
        const eval::ConfusionMatrix matrix = eval::confusion(predictions, *policy);
        py::dict per_class;
        for (SentimentLabel label : kAllLabels) {
          const eval::ClassMetrics cm = eval::per_class_metrics(matrix, label);
          py::dict entry;
          entry["precision"] = cm.precision;
          entry["recall"] = cm.recall;
          entry["f1"] = cm.f1;
          per_class[py::str(std::string(to_string(label)))] = entry;
        }
        py::dict d;
        d["macro_f1"] = eval::macro_f1(matrix);
        d["accuracy"] = eval::accuracy(matrix);
        d["per_class"] = per_class;
        d["n_docs"] = matrix.n_docs();
        d["n_parse_failures"] = matrix.n_parse_failures();
        return d;
      },
      py::arg("pairs"), py::arg("failure_policy") = "count_as_wrong",
      "Score (gold, predicted-or-None) pairs: macro-F1, accuracy, per-class metrics");

  m.def(
      "dataset_stats",
      [](const std::string& path, const std::string& format, const std::string& split) {
        corpus::LoadResult loaded = format == "wpan"
                                        ? corpus::load_wpan(path)
                                        : corpus::load_persent(path, split_from_string(split));
        const corpus::DatasetStats stats = corpus::compute_stats(loaded.docs);
        py::dict d;
        d["n_positive"] = stats.n_positive;
        d["n_neutral"] = stats.n_neutral;
        d["n_negative"] = stats.n_negative;
        d["n_total"] = stats.n_total;
        d["n_unique_entities"] = stats.n_unique_entities;
        d["n_rejected"] = loaded.rejected.size();
        d["n_excluded"] = loaded.n_excluded;
        return d;
      },
      py::arg("path"), py::arg("format"), py::arg("split") = std::string("train"),
      "Load a dataset file and return its label/entity statistics");

  m.def(
      "truncate_document",
      [](const std::string& text, const std::string& entity, long budget) {
        return prompting::truncate_document(text, entity, budget);
      },
      py::arg("text"), py::arg("entity"), py::arg("budget"),
      "Shorten a document to the character budget, keeping entity-bearing paragraphs");

  m.def("mock_completion", &gen::MockBackend::derived_completion, py::arg("prompt_digest"),
        py::arg("sample_index"), py::arg("salt"),
        "The deterministic completion the mock backend derives for unscripted prompts");

  m.def(
      "validate_config",
      [](const std::string& path) {
        return config::load_config(path).errors;  // empty list = valid
      },
      py::arg("path"), "Validate an experiment config; returns the list of problems (empty = ok)");

  m.def(
      "run_experiment",
      [](const std::string& config_path, int parallelism, long generation_budget,
         const std::optional<std::string>& output_dir, bool verbose) {
        config::ConfigResult loaded = config::load_config(config_path);
        if (!loaded.ok()) {
          std::string message = "invalid config:";
          for (const std::string& e : loaded.errors) message += "\n  - " + e;
          throw py::value_error(message);
        }
        engine::RunOptions options;
        options.parallelism_override = parallelism;
        options.generation_budget = generation_budget;
        options.verbose = verbose;
        if (output_dir) options.output_dir_override = *output_dir;
        engine::RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = engine::run_experiment(*loaded.config, options);
        }
        py::dict d;
        d["exit_code"] = outcome.exit_code;
        d["interrupted"] = outcome.interrupted;
        d["backend_calls"] = outcome.backend_calls;
        d["cache_hits"] = outcome.cache_hits;
        d["output_dir"] = outcome.output_dir.string();
        py::list failed;
        for (const auto& f : outcome.failed_cells) {
          py::dict cell;
          cell["cell"] = f.cell;
          cell["reason"] = f.reason;
          failed.append(cell);
        }
        d["failed_cells"] = failed;
        return d;
      },
      py::arg("config_path"), py::arg("parallelism") = 0, py::arg("generation_budget") = -1,
      py::arg("output_dir") = std::nullopt, py::arg("verbose") = false,
      "Run the full experiment grid of a config file");

  m.def(
      "dump_transcripts",
      [](const std::string& run_dir) { return engine::dump_transcripts(run_dir); },
      py::arg("run_dir"), "Human-readable listing of every transcript record in a run directory");
}
