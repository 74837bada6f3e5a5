#include "sentgrid/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sentgrid/backend.hpp"
#include "sentgrid/cache.hpp"
#include "sentgrid/consistency.hpp"
#include "sentgrid/corpus.hpp"
#include "sentgrid/digest.hpp"
#include "sentgrid/eval.hpp"
#include "sentgrid/generation.hpp"
#include "sentgrid/parse.hpp"
#include "sentgrid/prompting.hpp"
#include "sentgrid/templates.hpp"

namespace sentgrid::engine {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- file utils

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes via a temp file + rename so a file's existence implies it is whole.
void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path temp = path.parent_path() / (path.filename().string() + ".part");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + temp.string());
  }
  fs::rename(temp, path);
}

// ------------------------------------------------------------- serialization

ordered_json answer_to_json(const ParsedAnswer& answer) {
  ordered_json j;
  if (answer.label) {
    j["label"] = std::string(to_string(*answer.label));
  } else {
    j["failure"] = std::string(to_string(*answer.failure));
  }
  return j;
}

ordered_json path_to_json(const consistency::PathRecord& path) {
  ordered_json j;
  j["sample_index"] = path.sample_index;
  if (!path.stage1_prompt_digest.empty()) {
    j["stage1_prompt_digest"] = path.stage1_prompt_digest;
    j["stage1_text"] = path.stage1_text;
    j["rationale"] = path.rationale;
  }
  if (!path.prompt_digest.empty()) j["prompt_digest"] = path.prompt_digest;
  if (!path.text.empty() || path.error.empty()) j["text"] = path.text;
  j["parsed"] = answer_to_json(path.parsed);
  if (!path.error.empty()) j["error"] = path.error;
  return j;
}

ordered_json vote_to_json(const consistency::VoteResult& vote) {
  ordered_json counts;
  for (SentimentLabel label : kAllLabels) {
    counts[std::string(to_string(label))] = vote.counts[label_index(label)];
  }
  return ordered_json{{"winner", std::string(to_string(vote.winner))},
                      {"counts", counts},
                      {"n_valid", vote.n_valid},
                      {"n_failed", vote.n_failed},
                      {"tie_broken", vote.tie_broken}};
}

ordered_json report_to_json(const eval::EvalReport& report, const eval::ConfusionMatrix* matrix) {
  ordered_json j;
  j["strategy"] = report.strategy;
  j["backend"] = report.backend_id;
  j["dataset"] = report.dataset;
  j["run_seed"] = report.run_seed;
  j["n_runs"] = report.n_runs;
  j["n_docs"] = report.n_docs;
  j["n_parse_failures"] = report.n_parse_failures;
  ordered_json per_class;
  for (SentimentLabel label : kAllLabels) {
    const eval::ClassMetrics& m = report.per_class[label_index(label)];
    per_class[std::string(to_string(label))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  }
  j["per_class"] = per_class;
  j["macro_f1"] = report.macro_f1;
  j["accuracy"] = report.accuracy;
  if (matrix) {
    ordered_json rows = ordered_json::array();
    for (int g = 0; g < 3; ++g) {
      rows.push_back({matrix->cells[g][0], matrix->cells[g][1], matrix->cells[g][2]});
    }
    j["confusion"] = {{"rows_gold_cols_predicted", rows},
                      {"failures_by_gold",
                       {matrix->failures_by_gold[0], matrix->failures_by_gold[1],
                        matrix->failures_by_gold[2]}},
                      {"failure_policy", std::string(to_string(matrix->policy))}};
  }
  return j;
}

eval::EvalReport report_from_json(const json& j) {
  eval::EvalReport report;
  report.strategy = j.at("strategy").get<std::string>();
  report.backend_id = j.at("backend").get<std::string>();
  report.dataset = j.at("dataset").get<std::string>();
  report.run_seed = j.at("run_seed").get<std::uint64_t>();
  report.n_runs = j.value("n_runs", 1);
  report.n_docs = j.at("n_docs").get<long>();
  report.n_parse_failures = j.at("n_parse_failures").get<long>();
  for (SentimentLabel label : kAllLabels) {
    const json& m = j.at("per_class").at(std::string(to_string(label)));
    auto& out = report.per_class[label_index(label)];
    out.precision = m.at("precision").get<double>();
    out.recall = m.at("recall").get<double>();
    out.f1 = m.at("f1").get<double>();
  }
  report.macro_f1 = j.at("macro_f1").get<double>();
  report.accuracy = j.at("accuracy").get<double>();
  return report;
}

// --------------------------------------------------------------- experiment

struct LoadedDataset {
  config::DatasetSpec spec;
  std::vector<corpus::LabeledDocument> docs;
};

std::vector<corpus::LabeledDocument> load_dataset(const config::DatasetSpec& spec) {
  corpus::LoadResult loaded;
  if (spec.format == "wpan") {
    loaded = corpus::load_wpan(spec.path.string());
  } else {
    corpus::PersentSplit split = corpus::PersentSplit::Train;
    if (spec.split == "dev") split = corpus::PersentSplit::Dev;
    if (spec.split == "test-std") split = corpus::PersentSplit::TestStd;
    if (spec.split == "test-freq") split = corpus::PersentSplit::TestFreq;
    loaded = corpus::load_persent(spec.path.string(), split);
  }
  if (!loaded.rejected.empty()) {
    std::ostringstream msg;
    msg << "dataset " << spec.name << " rejected " << loaded.rejected.size()
        << " record(s); first: row " << loaded.rejected.front().row << ": "
        << loaded.rejected.front().reason;
    throw std::runtime_error(msg.str());
  }
  return std::move(loaded.docs);
}

std::map<std::string, std::string> load_rationale_table(const fs::path& path) {
  if (path.empty()) return {};
  json parsed = json::parse(read_file(path), nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw std::runtime_error("rationale table is not a JSON object: " + path.string());
  }
  std::map<std::string, std::string> table;
  for (const auto& item : parsed.items()) table[item.key()] = item.value().get<std::string>();
  return table;
}

// Predicts one document, shrinking the render budget when the backend
// rejects the prompt as too long.
consistency::PredictionResult predict_document(
    gen::GenerationService& service, const std::string& backend_id,
    const corpus::LabeledDocument& doc, const config::StrategySpec& spec,
    const std::vector<corpus::Exemplar>& exemplars, const prompting::TemplateSet& templates,
    const gen::SamplingConfig& sampling, long char_budget) {
  long budget = char_budget;
  for (;;) {
    const prompting::RenderOptions render{budget};
    try {
      if (spec.strategy.self_consistency) {
        return consistency::run_self_consistency(service, backend_id, doc, spec.strategy,
                                                 exemplars, templates, sampling, render);
      }
      consistency::PredictionResult result;
      consistency::PathRecord path = consistency::run_path(
          service, backend_id, doc, spec.strategy.kind, exemplars, templates, sampling, render, 0);
      result.answer = path.parsed;
      result.paths.push_back(std::move(path));
      return result;
    } catch (const gen::ContextLengthError&) {
      if (budget <= 256) throw;  // give up; the cell records the failure
      budget /= 2;
    }
  }
}

struct CellLocation {
  int run_index = 0;  // 0-based
  std::uint64_t seed = 0;
  const config::DatasetSpec* dataset = nullptr;
  const config::BackendSpec* backend = nullptr;
  const config::StrategySpec* strategy = nullptr;

  std::string tag() const {
    return "run-" + std::to_string(run_index + 1) + "/" + dataset->name + "/" + backend->id +
           "/" + strategy->name;
  }
};

void run_cell(const config::ExperimentConfig& cfg, gen::GenerationService& service,
              const prompting::TemplateSet& templates, const CellLocation& cell,
              const std::vector<corpus::LabeledDocument>& docs,
              const std::vector<corpus::Exemplar>& exemplars, int parallelism,
              const fs::path& cell_dir) {
  gen::SamplingConfig sampling = cell.strategy->sampling;
  sampling.seed = cell.seed;

  std::vector<consistency::PredictionResult> results(docs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= docs.size()) return;
      try {
        results[i] = predict_document(service, cell.backend->id, docs[i], *cell.strategy,
                                      exemplars, templates, sampling, cfg.char_budget);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        abort.store(true);
        return;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(parallelism, static_cast<int>(docs.size())));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  // Everything below is single-threaded and index-ordered, so the artifacts
  // are byte-stable no matter how many workers ran above.
  std::string transcript;
  std::vector<eval::Prediction> predictions;
  predictions.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const consistency::PredictionResult& r = results[i];
    ordered_json rec;
    rec["doc_id"] = docs[i].id;
    rec["gold"] = std::string(to_string(docs[i].gold_label));
    rec["answer"] = answer_to_json(r.answer);
    if (r.vote) rec["vote"] = vote_to_json(*r.vote);
    ordered_json paths = ordered_json::array();
    for (const consistency::PathRecord& p : r.paths) paths.push_back(path_to_json(p));
    rec["paths"] = std::move(paths);
    transcript += rec.dump() + "\n";
    predictions.push_back({docs[i].gold_label, r.answer.label});
  }

  const eval::ConfusionMatrix matrix = eval::confusion(predictions, cfg.failure_policy);
  eval::EvalReport report = eval::make_report(matrix, cell.strategy->name, cell.backend->id,
                                              cell.dataset->name, cell.seed);

  write_file_atomic(cell_dir / "transcript.jsonl", transcript);
  write_file_atomic(cell_dir / "report.json", report_to_json(report, &matrix).dump(2) + "\n");
}

// ---------------------------------------------------------------- summaries

struct Manifest {
  std::vector<std::string> datasets;
  std::vector<std::string> backends;
  std::vector<std::pair<std::string, eval::TableColumn>> strategies;  // name -> column
  std::vector<config::BaselineSpec> baselines;
  int n_runs = 0;
};

Manifest manifest_from_config(const config::ExperimentConfig& cfg) {
  Manifest m;
  for (const auto& d : cfg.datasets) m.datasets.push_back(d.name);
  for (const auto& b : cfg.backends) m.backends.push_back(b.id);
  for (const auto& s : cfg.strategies) m.strategies.emplace_back(s.name, s.table_column);
  m.baselines = cfg.baselines;
  m.n_runs = cfg.n_runs;
  return m;
}

ordered_json manifest_to_json(const Manifest& m) {
  ordered_json strategies = ordered_json::array();
  for (const auto& [name, column] : m.strategies) {
    strategies.push_back({{"name", name}, {"table_column", std::string(to_string(column))}});
  }
  ordered_json baselines = ordered_json::array();
  for (const auto& b : m.baselines) {
    ordered_json values;
    for (const auto& [dataset, value] : b.values) values[dataset] = value;
    baselines.push_back(
        {{"name", b.name}, {"provenance", b.provenance}, {"values", values}});
  }
  return ordered_json{{"datasets", m.datasets},
                      {"backends", m.backends},
                      {"strategies", strategies},
                      {"baselines", baselines},
                      {"n_runs", m.n_runs}};
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  for (const json& d : j.at("datasets")) m.datasets.push_back(d.get<std::string>());
  for (const json& b : j.at("backends")) m.backends.push_back(b.get<std::string>());
  for (const json& s : j.at("strategies")) {
    const auto column = eval::parse_table_column(s.at("table_column").get<std::string>());
    if (!column) throw std::runtime_error("manifest names an unknown table column");
    m.strategies.emplace_back(s.at("name").get<std::string>(), *column);
  }
  for (const json& b : j.value("baselines", json::array())) {
    config::BaselineSpec spec;
    spec.name = b.at("name").get<std::string>();
    spec.provenance = b.value("provenance", "");
    for (const auto& item : b.at("values").items()) {
      spec.values[item.key()] = item.value().get<double>();
    }
    m.baselines.push_back(std::move(spec));
  }
  m.n_runs = j.at("n_runs").get<int>();
  return m;
}

// Averages each cell's per-run reports and renders one table per dataset.
// Returns false when a report file exists but cannot be read.
bool write_summaries(const fs::path& out_dir, const Manifest& manifest, std::ostream* echo) {
  bool ok = true;
  ordered_json cells = ordered_json::array();
  for (const std::string& dataset : manifest.datasets) {
    std::vector<eval::TableRow> rows;
    for (const std::string& backend : manifest.backends) {
      eval::TableRow row;
      row.name = backend;
      for (const auto& [strategy, column] : manifest.strategies) {
        std::vector<eval::EvalReport> reports;
        for (int r = 1; r <= manifest.n_runs; ++r) {
          const fs::path path = out_dir / "runs" / ("run-" + std::to_string(r)) / dataset /
                                backend / strategy / "report.json";
          if (!fs::exists(path)) continue;
          try {
            reports.push_back(report_from_json(json::parse(read_file(path))));
          } catch (const std::exception& e) {
            if (echo) *echo << "skipping unreadable report " << path.string() << ": " << e.what()
                            << "\n";
            ok = false;
          }
        }
        if (reports.empty()) continue;
        const eval::EvalReport averaged = eval::average_runs(reports);
        row.macro_f1[static_cast<int>(column)] = averaged.macro_f1;
        ordered_json cell = report_to_json(averaged, nullptr);
        cell["table_column"] = std::string(to_string(column));
        cells.push_back(std::move(cell));
      }
      rows.push_back(std::move(row));
    }
    for (const config::BaselineSpec& baseline : manifest.baselines) {
      const auto it = baseline.values.find(dataset);
      if (it == baseline.values.end()) continue;
      eval::TableRow row;
      row.name = baseline.name;
      row.reference = true;
      // A quoted baseline has one number per dataset, not one per strategy;
      // it occupies the first column and dashes out the rest.
      row.macro_f1[0] = it->second / 100.0;
      rows.push_back(std::move(row));
    }
    const eval::RenderedTable table = eval::render_table(dataset, rows);
    write_file_atomic(out_dir / "summary" / (dataset + ".txt"), table.text);
    write_file_atomic(out_dir / "summary" / (dataset + ".tsv"), table.tsv);
    if (echo) *echo << table.text << "\n";
  }
  write_file_atomic(out_dir / "summary" / "cells.json", cells.dump(2) + "\n");
  return ok;
}

}  // namespace

RunOutcome run_experiment(const config::ExperimentConfig& cfg, const RunOptions& options) {
  RunOutcome outcome;
  const fs::path out_dir = options.output_dir_override.value_or(cfg.output_dir);
  outcome.output_dir = out_dir;
  fs::create_directories(out_dir);

  // Snapshot the config so the run directory is self-describing; refuse to
  // mix artifacts from two different configs in one directory.
  const std::string config_bytes = read_file(cfg.source_path);
  const fs::path snapshot = out_dir / "config.json";
  if (fs::exists(snapshot)) {
    if (read_file(snapshot) != config_bytes) {
      throw std::runtime_error("output directory " + out_dir.string() +
                               " holds a run of a different config; refusing to mix them");
    }
  } else {
    write_file_atomic(snapshot, config_bytes);
  }
  const Manifest manifest = manifest_from_config(cfg);
  write_file_atomic(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");

  const prompting::TemplateSet templates = prompting::TemplateSet::load(cfg.templates_dir.string());

  std::vector<LoadedDataset> datasets;
  for (const config::DatasetSpec& spec : cfg.datasets) {
    datasets.push_back({spec, load_dataset(spec)});
  }

  const bool any_few_shot =
      std::any_of(cfg.strategies.begin(), cfg.strategies.end(),
                  [](const config::StrategySpec& s) { return s.strategy.is_few_shot(); });
  const bool any_cot =
      std::any_of(cfg.strategies.begin(), cfg.strategies.end(), [](const config::StrategySpec& s) {
        return s.strategy.kind == prompting::StrategyKind::FewShotCot;
      });
  std::vector<corpus::LabeledDocument> train_pool;
  std::map<std::string, std::string> rationales;
  if (any_few_shot) {
    corpus::PersentSplit split = corpus::PersentSplit::Train;
    if (cfg.exemplars.train_split == "dev") split = corpus::PersentSplit::Dev;
    if (cfg.exemplars.train_split == "test-std") split = corpus::PersentSplit::TestStd;
    if (cfg.exemplars.train_split == "test-freq") split = corpus::PersentSplit::TestFreq;
    corpus::LoadResult loaded = corpus::load_persent(cfg.exemplars.train_path.string(), split);
    train_pool = std::move(loaded.docs);
    if (any_cot) rationales = load_rationale_table(cfg.exemplars.rationale_table);
  }

  gen::GenerationCache cache(out_dir / "cache");
  gen::GenerationService::Options service_options;
  service_options.call_budget = options.generation_budget;
  gen::GenerationService service(&cache, service_options);
  for (const config::BackendSpec& spec : cfg.backends) {
    if (spec.is_mock()) {
      service.register_backend(std::make_shared<gen::MockBackend>(spec.id, spec.script.string()));
    } else {
      gen::HttpBackend::Options http;
      http.endpoint = spec.endpoint;
      http.model = spec.model;
      http.auth_env = spec.auth_env;
      http.timeout_s = spec.timeout_s;
      service.register_backend(std::make_shared<gen::HttpBackend>(spec.id, http));
    }
  }

  const int parallelism =
      options.parallelism_override > 0 ? options.parallelism_override : cfg.parallelism;

  for (int r = 0; r < cfg.n_runs && !outcome.interrupted; ++r) {
    const std::uint64_t seed = cfg.seeds[r];

    std::vector<corpus::Exemplar> plain_exemplars;
    std::vector<corpus::Exemplar> cot_exemplars;
    if (any_few_shot) {
      corpus::ExemplarOptions opts;
      opts.n = cfg.exemplars.n;
      opts.seed = cfg.exemplars.seed ^ seed;
      opts.stratified = cfg.exemplars.stratified;
      plain_exemplars = corpus::select_exemplars(train_pool, opts);
      if (any_cot) {
        opts.with_rationale = true;
        cot_exemplars = corpus::select_exemplars(train_pool, opts, rationales);
      }
    }

    for (const LoadedDataset& dataset : datasets) {
      for (const config::BackendSpec& backend : cfg.backends) {
        for (const config::StrategySpec& strategy : cfg.strategies) {
          CellLocation cell{r, seed, &dataset.spec, &backend, &strategy};
          const fs::path cell_dir = out_dir / "runs" / ("run-" + std::to_string(r + 1)) /
                                    dataset.spec.name / backend.id / strategy.name;
          if (fs::exists(cell_dir / "report.json")) continue;  // finished earlier; resume past it
          if (options.verbose) std::cerr << "cell " << cell.tag() << "\n";
          const std::vector<corpus::Exemplar>* exemplars = &plain_exemplars;
          if (strategy.strategy.kind == prompting::StrategyKind::FewShotCot) {
            exemplars = &cot_exemplars;
          }
          static const std::vector<corpus::Exemplar> kNoExemplars;
          if (!strategy.strategy.is_few_shot()) exemplars = &kNoExemplars;
          try {
            run_cell(cfg, service, templates, cell, dataset.docs, *exemplars, parallelism,
                     cell_dir);
          } catch (const gen::BudgetExhausted& e) {
            outcome.interrupted = true;
            if (options.verbose) std::cerr << "stopping: " << e.what() << "\n";
          } catch (const std::exception& e) {
            outcome.failed_cells.push_back({cell.tag(), e.what()});
          }
          if (outcome.interrupted) break;
        }
        if (outcome.interrupted) break;
      }
      if (outcome.interrupted) break;
    }
  }

  if (!outcome.interrupted) write_summaries(out_dir, manifest, nullptr);

  outcome.backend_calls = service.backend_calls();
  outcome.cache_hits = service.cache_hits();
  ordered_json stats{{"backend_calls", outcome.backend_calls},
                     {"cache_hits", outcome.cache_hits},
                     {"interrupted", outcome.interrupted},
                     {"failed_cells", ordered_json::array()}};
  for (const CellFailure& f : outcome.failed_cells) {
    stats["failed_cells"].push_back({{"cell", f.cell}, {"reason", f.reason}});
  }
  write_file_atomic(out_dir / "stats.json", stats.dump(2) + "\n");

  outcome.exit_code = (outcome.interrupted || !outcome.failed_cells.empty()) ? 1 : 0;
  return outcome;
}

int render_reports(const fs::path& run_dir, std::ostream& out) {
  const fs::path manifest_path = run_dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    out << "no run manifest at " << manifest_path.string() << "\n";
    return 1;
  }
  Manifest manifest;
  try {
    manifest = manifest_from_json(json::parse(read_file(manifest_path)));
  } catch (const std::exception& e) {
    out << "cannot read manifest: " << e.what() << "\n";
    return 1;
  }
  return write_summaries(run_dir, manifest, &out) ? 0 : 1;
}

std::string dump_transcripts(const fs::path& run_dir) {
  if (!fs::exists(run_dir)) {
    throw std::runtime_error("run directory does not exist: " + run_dir.string());
  }
  std::vector<fs::path> files;
  const fs::path runs = run_dir / "runs";
  if (fs::exists(runs)) {
    for (const auto& entry : fs::recursive_directory_iterator(runs)) {
      if (entry.is_regular_file() && entry.path().filename() == "transcript.jsonl") {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  std::ostringstream out;
  for (const fs::path& file : files) {
    // runs/<run>/<dataset>/<backend>/<strategy>/transcript.jsonl
    const fs::path rel = fs::relative(file.parent_path(), runs);
    std::ifstream in(file, std::ios::binary);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) {
        out << "=== " << rel.generic_string() << " line " << line_no
            << " [decode error: not a JSON record] ===\n\n";
        continue;
      }
      out << "=== " << rel.generic_string() << " doc " << rec.value("doc_id", "?") << " ===\n";
      out << "gold: " << rec.value("gold", "?");
      if (rec.contains("answer")) {
        const json& a = rec["answer"];
        out << "  answer: "
            << (a.contains("label") ? a["label"].get<std::string>()
                                    : "failure(" + a.value("failure", "?") + ")");
      }
      out << "\n";
      if (rec.contains("vote")) {
        const json& v = rec["vote"];
        out << "vote: winner " << v.value("winner", "?") << ", counts";
        if (v.contains("counts")) {
          for (const auto& item : v["counts"].items()) {
            out << " " << item.key() << "=" << item.value().dump();
          }
        }
        out << ", valid " << v.value("n_valid", 0) << ", failed " << v.value("n_failed", 0)
            << (v.value("tie_broken", false) ? ", tie broken" : "") << "\n";
      }
      for (const json& p : rec.value("paths", json::array())) {
        out << "path " << p.value("sample_index", 0) << ":";
        if (p.contains("stage1_prompt_digest")) {
          out << " stage1 " << p["stage1_prompt_digest"].get<std::string>().substr(0, 12);
        }
        if (p.contains("prompt_digest")) {
          out << " prompt " << p["prompt_digest"].get<std::string>().substr(0, 12);
        }
        const json& parsed = p.value("parsed", json::object());
        out << "  -> "
            << (parsed.contains("label") ? parsed["label"].get<std::string>()
                                         : "failure(" + parsed.value("failure", "?") + ")")
            << "\n";
        if (p.contains("rationale") && !p["rationale"].get<std::string>().empty()) {
          out << "  rationale: " << p["rationale"].get<std::string>() << "\n";
        }
        if (p.contains("text") && !p["text"].get<std::string>().empty()) {
          std::istringstream text(p["text"].get<std::string>());
          std::string text_line;
          while (std::getline(text, text_line)) out << "  | " << text_line << "\n";
        }
        if (p.contains("error")) out << "  error: " << p["error"].get<std::string>() << "\n";
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace sentgrid::engine
