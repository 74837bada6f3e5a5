#include "sentgrid/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "sentgrid/templates.hpp"

namespace sentgrid::config {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* json_type_name(const json& v) {
  if (v.is_string()) return "string";
  if (v.is_boolean()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  if (v.is_null()) return "null";
  return "value";
}

// Collects every problem instead of stopping at the first one.
struct Validator {
  fs::path base;
  std::vector<std::string> errors;

  void error(const std::string& where, const std::string& what) {
    errors.push_back(where.empty() ? what : where + ": " + what);
  }

  void check_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
            return item.key() == k;
          }) == allowed.end()) {
        error(where, "unknown key \"" + item.key() + "\"");
      }
    }
  }

  template <typename T>
  std::optional<T> fetch(const json& obj, const std::string& where, const char* key,
                         const char* type_name) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      error(where, std::string("\"") + key + "\" must be a " + type_name + ", got " +
                       json_type_name(v));
      return std::nullopt;
    }
  }

  std::optional<std::string> get_string(const json& o, const std::string& w, const char* k) {
    if (o.contains(k) && !o.at(k).is_string()) {
      error(w, std::string("\"") + k + "\" must be a string, got " + json_type_name(o.at(k)));
      return std::nullopt;
    }
    return fetch<std::string>(o, w, k, "string");
  }
  std::optional<long> get_int(const json& o, const std::string& w, const char* k) {
    if (o.contains(k) && !o.at(k).is_number_integer()) {
      error(w, std::string("\"") + k + "\" must be an integer, got " + json_type_name(o.at(k)));
      return std::nullopt;
    }
    return fetch<long>(o, w, k, "integer");
  }
  std::optional<double> get_real(const json& o, const std::string& w, const char* k) {
    if (o.contains(k) && !o.at(k).is_number()) {
      error(w, std::string("\"") + k + "\" must be a number, got " + json_type_name(o.at(k)));
      return std::nullopt;
    }
    return fetch<double>(o, w, k, "number");
  }
  std::optional<bool> get_bool(const json& o, const std::string& w, const char* k) {
    if (o.contains(k) && !o.at(k).is_boolean()) {
      error(w, std::string("\"") + k + "\" must be a boolean, got " + json_type_name(o.at(k)));
      return std::nullopt;
    }
    return fetch<bool>(o, w, k, "boolean");
  }

  fs::path resolve(const std::string& p) const {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  }

  fs::path require_path(const std::string& raw, const std::string& where) {
    const fs::path resolved = resolve(raw);
    std::error_code ec;
    if (!fs::exists(resolved, ec)) error(where, "path does not exist: " + resolved.string());
    return resolved;
  }
};

gen::SamplingConfig parse_sampling(Validator& v, const json& obj, const std::string& where) {
  gen::SamplingConfig sampling;
  if (!obj.is_object()) {
    v.error(where, "\"sampling\" must be an object");
    return sampling;
  }
  v.check_keys(obj, where,
               {"mode", "top_k", "top_p", "temperature", "max_new_tokens", "allow_out_of_range"});
  if (obj.contains("seed")) {
    v.error(where, "\"seed\" is not configured per strategy; decoding seeds come from the "
                   "run-level \"seeds\" list");
  }
  if (const auto mode = v.get_string(obj, where, "mode")) {
    if (*mode == "greedy") {
      sampling.mode = gen::DecodeMode::Greedy;
    } else if (*mode == "sampled") {
      sampling.mode = gen::DecodeMode::Sampled;
    } else {
      v.error(where, "\"mode\" must be \"greedy\" or \"sampled\", got \"" + *mode + "\"");
    }
  } else if (!obj.contains("mode")) {
    v.error(where, "\"mode\" is required (\"greedy\" or \"sampled\")");
  }
  if (const auto k = v.get_int(obj, where, "top_k")) sampling.top_k = static_cast<int>(*k);
  if (const auto p = v.get_real(obj, where, "top_p")) sampling.top_p = *p;
  if (const auto t = v.get_real(obj, where, "temperature")) sampling.temperature = *t;
  if (const auto m = v.get_int(obj, where, "max_new_tokens")) {
    sampling.max_new_tokens = static_cast<int>(*m);
  }
  if (const auto a = v.get_bool(obj, where, "allow_out_of_range")) sampling.allow_out_of_range = *a;
  for (const std::string& violation : gen::validate(sampling)) v.error(where, violation);
  return sampling;
}

}  // namespace

ConfigResult load_config(const fs::path& path) {
  ConfigResult result;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    result.errors.push_back("cannot open config file: " + path.string());
    return result;
  }
  json root = json::parse(in, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    result.errors.push_back("config is not a JSON object: " + path.string());
    return result;
  }

  Validator v;
  v.base = fs::absolute(path).parent_path();
  ExperimentConfig cfg;
  cfg.source_path = fs::absolute(path);
  cfg.base_dir = v.base;

  v.check_keys(root, "config",
               {"output_dir", "templates_dir", "n_runs", "seeds", "parallelism", "char_budget",
                "failure_policy", "datasets", "backends", "strategies", "exemplars", "baselines"});

  if (const auto s = v.get_string(root, "config", "output_dir")) cfg.output_dir = v.resolve(*s);
  if (const auto s = v.get_string(root, "config", "templates_dir")) {
    cfg.templates_dir = v.require_path(*s, "templates_dir");
    if (!cfg.templates_dir.empty() && fs::exists(cfg.templates_dir)) {
      try {
        prompting::TemplateSet::load(cfg.templates_dir);
      } catch (const std::exception& e) {
        v.error("templates_dir", e.what());
      }
    }
  } else {
    v.error("config", "\"templates_dir\" is required");
  }

  if (const auto n = v.get_int(root, "config", "n_runs")) {
    cfg.n_runs = static_cast<int>(*n);
    if (cfg.n_runs < 1) v.error("n_runs", "must be at least 1");
  }
  if (root.contains("seeds")) {
    if (!root["seeds"].is_array()) {
      v.error("seeds", "must be an array of integers");
    } else {
      for (const json& s : root["seeds"]) {
        if (!s.is_number_integer() || s.get<long long>() < 0) {
          v.error("seeds", "entries must be non-negative integers");
          break;
        }
        cfg.seeds.push_back(s.get<std::uint64_t>());
      }
    }
  }
  if (cfg.seeds.empty()) {
    for (int i = 1; i <= cfg.n_runs; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
  } else if (static_cast<int>(cfg.seeds.size()) != cfg.n_runs) {
    v.error("seeds", "length " + std::to_string(cfg.seeds.size()) + " does not match n_runs " +
                         std::to_string(cfg.n_runs));
  }
  if (const auto p = v.get_int(root, "config", "parallelism")) {
    cfg.parallelism = static_cast<int>(*p);
    if (cfg.parallelism < 1) v.error("parallelism", "must be at least 1");
  }
  if (const auto b = v.get_int(root, "config", "char_budget")) {
    cfg.char_budget = *b;
    if (cfg.char_budget < 1) v.error("char_budget", "must be positive");
  }
  if (const auto s = v.get_string(root, "config", "failure_policy")) {
    if (const auto policy = eval::parse_failure_policy(*s)) {
      cfg.failure_policy = *policy;
    } else {
      v.error("failure_policy",
              "\"" + *s + "\" is not one of count_as_wrong, exclude, fallback_neutral");
    }
  }

  // --- datasets ---
  std::set<std::string> dataset_names;
  if (!root.contains("datasets") || !root["datasets"].is_array() || root["datasets"].empty()) {
    v.error("config", "\"datasets\" must be a non-empty array");
  } else {
    int i = 0;
    for (const json& obj : root["datasets"]) {
      const std::string where = "datasets[" + std::to_string(i++) + "]";
      if (!obj.is_object()) {
        v.error(where, "must be an object");
        continue;
      }
      v.check_keys(obj, where, {"name", "path", "format", "split"});
      DatasetSpec spec;
      if (const auto s = v.get_string(obj, where, "name")) spec.name = *s;
      if (spec.name.empty()) v.error(where, "\"name\" is required");
      if (!dataset_names.insert(spec.name).second) {
        v.error(where, "duplicate dataset name \"" + spec.name + "\"");
      }
      if (const auto s = v.get_string(obj, where, "path")) {
        spec.path = v.require_path(*s, where);
      } else {
        v.error(where, "\"path\" is required");
      }
      if (const auto s = v.get_string(obj, where, "format")) spec.format = *s;
      if (spec.format != "persent" && spec.format != "wpan") {
        v.error(where, "\"format\" must be \"persent\" or \"wpan\"");
      }
      if (const auto s = v.get_string(obj, where, "split")) spec.split = *s;
      if (spec.format == "persent") {
        static const std::set<std::string> kSplits{"train", "dev", "test-std", "test-freq"};
        if (!kSplits.count(spec.split)) {
          v.error(where, "persent datasets need \"split\" of train, dev, test-std or test-freq");
        }
      } else if (!spec.split.empty()) {
        v.error(where, "\"split\" only applies to persent datasets");
      }
      cfg.datasets.push_back(std::move(spec));
    }
  }

  // --- backends ---
  std::set<std::string> backend_ids;
  if (!root.contains("backends") || !root["backends"].is_array() || root["backends"].empty()) {
    v.error("config", "\"backends\" must be a non-empty array");
  } else {
    int i = 0;
    for (const json& obj : root["backends"]) {
      const std::string where = "backends[" + std::to_string(i++) + "]";
      if (!obj.is_object()) {
        v.error(where, "must be an object");
        continue;
      }
      v.check_keys(obj, where, {"id", "script", "endpoint", "model", "auth_env", "timeout_s"});
      BackendSpec spec;
      if (const auto s = v.get_string(obj, where, "id")) spec.id = *s;
      if (spec.id.empty()) v.error(where, "\"id\" is required");
      if (!backend_ids.insert(spec.id).second) {
        v.error(where, "duplicate backend id \"" + spec.id + "\"");
      }
      const bool has_script = obj.contains("script");
      const bool has_endpoint = obj.contains("endpoint");
      if (has_script == has_endpoint) {
        v.error(where, "exactly one of \"script\" (mock) or \"endpoint\" (http) is required");
      }
      if (const auto s = v.get_string(obj, where, "script")) {
        spec.script = v.require_path(*s, where);
      }
      if (const auto s = v.get_string(obj, where, "endpoint")) spec.endpoint = *s;
      if (const auto s = v.get_string(obj, where, "model")) spec.model = *s;
      if (has_endpoint && spec.model.empty()) {
        v.error(where, "http backends need a \"model\" name");
      }
      if (const auto s = v.get_string(obj, where, "auth_env")) spec.auth_env = *s;
      if (const auto t = v.get_int(obj, where, "timeout_s")) {
        spec.timeout_s = static_cast<int>(*t);
        if (spec.timeout_s < 1) v.error(where, "\"timeout_s\" must be at least 1");
      }
      cfg.backends.push_back(std::move(spec));
    }
  }

  // --- strategies ---
  bool any_few_shot = false;
  bool any_cot_exemplars = false;
  std::set<std::string> strategy_names;
  std::set<std::string> used_columns;
  if (!root.contains("strategies") || !root["strategies"].is_array() ||
      root["strategies"].empty()) {
    v.error("config", "\"strategies\" must be a non-empty array");
  } else {
    int i = 0;
    for (const json& obj : root["strategies"]) {
      const std::string where = "strategies[" + std::to_string(i++) + "]";
      if (!obj.is_object()) {
        v.error(where, "must be an object");
        continue;
      }
      v.check_keys(obj, where,
                   {"name", "kind", "self_consistency", "n_paths", "table_column", "sampling"});
      StrategySpec spec;
      std::string kind;
      if (const auto s = v.get_string(obj, where, "kind")) kind = *s;
      if (kind == "zero_shot_std") {
        spec.strategy.kind = prompting::StrategyKind::ZeroShotStd;
      } else if (kind == "zero_shot_two_stage") {
        spec.strategy.kind = prompting::StrategyKind::ZeroShotTwoStage;
      } else if (kind == "few_shot_std") {
        spec.strategy.kind = prompting::StrategyKind::FewShotStd;
      } else if (kind == "few_shot_cot") {
        spec.strategy.kind = prompting::StrategyKind::FewShotCot;
      } else {
        v.error(where, "\"kind\" must be one of zero_shot_std, zero_shot_two_stage, "
                       "few_shot_std, few_shot_cot");
      }
      if (const auto b = v.get_bool(obj, where, "self_consistency")) {
        spec.strategy.self_consistency = *b;
      }
      if (const auto n = v.get_int(obj, where, "n_paths")) {
        spec.strategy.n_paths = static_cast<int>(*n);
      }
      if (spec.strategy.self_consistency) {
        if (spec.strategy.n_paths < 1) v.error(where, "\"n_paths\" must be at least 1");
      } else if (obj.contains("n_paths")) {
        v.error(where, "\"n_paths\" only applies when self_consistency is true");
      }

      std::string column;
      if (const auto s = v.get_string(obj, where, "table_column")) column = *s;
      if (const auto parsed = eval::parse_table_column(column)) {
        spec.table_column = *parsed;
        if (!used_columns.insert(column).second) {
          v.error(where, "table column \"" + column + "\" is already taken by another strategy");
        }
      } else {
        v.error(where, "\"table_column\" must be one of zero_shot_std, zero_shot_two_stage, "
                       "zero_shot_sc, few_shot_std, few_shot_cot, few_shot_sc");
      }

      if (const auto s = v.get_string(obj, where, "name")) spec.name = *s;
      if (spec.name.empty()) spec.name = column.empty() ? ("strategy-" + std::to_string(i)) : column;
      if (!strategy_names.insert(spec.name).second) {
        v.error(where, "duplicate strategy name \"" + spec.name + "\"");
      }

      if (obj.contains("sampling")) {
        spec.sampling = parse_sampling(v, obj["sampling"], where + ".sampling");
      } else {
        v.error(where, "\"sampling\" is required");
      }
      if (spec.strategy.self_consistency && spec.sampling.mode != gen::DecodeMode::Sampled) {
        v.error(where, "self-consistency samples multiple reasoning paths and needs "
                       "sampling mode \"sampled\"");
      }
      if (spec.strategy.kind == prompting::StrategyKind::ZeroShotTwoStage &&
          spec.sampling.mode != gen::DecodeMode::Sampled) {
        v.error(where, "two-stage prompting samples opinions in stage 1 and needs "
                       "sampling mode \"sampled\"");
      }
      if (spec.strategy.is_few_shot()) any_few_shot = true;
      if (spec.strategy.kind == prompting::StrategyKind::FewShotCot) any_cot_exemplars = true;
      cfg.strategies.push_back(std::move(spec));
    }
  }

  // --- exemplars ---
  if (root.contains("exemplars")) {
    const json& obj = root["exemplars"];
    const std::string where = "exemplars";
    if (!obj.is_object()) {
      v.error(where, "must be an object");
    } else {
      v.check_keys(obj, where,
                   {"n", "seed", "train_path", "train_split", "rationale_table", "stratified"});
      if (const auto n = v.get_int(obj, where, "n")) {
        cfg.exemplars.n = static_cast<int>(*n);
        if (cfg.exemplars.n < 3 || cfg.exemplars.n > 4) {
          v.error(where, "\"n\" must be 3 or 4 demonstrations");
        }
      }
      if (const auto s = v.get_int(obj, where, "seed")) {
        if (*s < 0) {
          v.error(where, "\"seed\" must be non-negative");
        } else {
          cfg.exemplars.seed = static_cast<std::uint64_t>(*s);
        }
      }
      if (const auto s = v.get_string(obj, where, "train_path")) {
        cfg.exemplars.train_path = v.require_path(*s, where);
      }
      if (const auto s = v.get_string(obj, where, "train_split")) cfg.exemplars.train_split = *s;
      if (const auto s = v.get_string(obj, where, "rationale_table")) {
        cfg.exemplars.rationale_table = v.require_path(*s, where);
      }
      if (const auto b = v.get_bool(obj, where, "stratified")) cfg.exemplars.stratified = *b;
    }
  }
  if (any_few_shot && cfg.exemplars.train_path.empty()) {
    v.error("exemplars", "few-shot strategies need \"exemplars.train_path\"");
  }
  if (any_cot_exemplars && cfg.exemplars.rationale_table.empty()) {
    v.error("exemplars", "chain-of-thought strategies need \"exemplars.rationale_table\"");
  }

  // --- baselines ---
  if (root.contains("baselines")) {
    if (!root["baselines"].is_array()) {
      v.error("baselines", "must be an array");
    } else {
      int i = 0;
      for (const json& obj : root["baselines"]) {
        const std::string where = "baselines[" + std::to_string(i++) + "]";
        if (!obj.is_object()) {
          v.error(where, "must be an object");
          continue;
        }
        v.check_keys(obj, where, {"name", "provenance", "values"});
        BaselineSpec spec;
        if (const auto s = v.get_string(obj, where, "name")) spec.name = *s;
        if (spec.name.empty()) v.error(where, "\"name\" is required");
        if (const auto s = v.get_string(obj, where, "provenance")) spec.provenance = *s;
        if (!obj.contains("values") || !obj["values"].is_object()) {
          v.error(where, "\"values\" must be an object mapping dataset name to macro-F1 %");
        } else {
          for (const auto& item : obj["values"].items()) {
            if (!dataset_names.count(item.key())) {
              v.error(where, "values name unknown dataset \"" + item.key() + "\"");
            }
            if (!item.value().is_number()) {
              v.error(where, "value for \"" + item.key() + "\" must be a number");
              continue;
            }
            const double val = item.value().get<double>();
            if (val < 0 || val > 100) {
              v.error(where, "value for \"" + item.key() + "\" must be a percentage in [0, 100]");
            }
            spec.values[item.key()] = val;
          }
        }
        cfg.baselines.push_back(std::move(spec));
      }
    }
  }

  result.errors = std::move(v.errors);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

}  // namespace sentgrid::config
