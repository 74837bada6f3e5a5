#include "sentgrid/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sentgrid::corpus {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool looks_like_jsonl(const std::string& content) {
  for (char c : content) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

// Splits delimited text into records. Quoted fields may contain the
// delimiter, doubled quotes, and embedded newlines.
std::vector<std::vector<std::string>> parse_delimited(const std::string& content, char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (!field.empty() || !record.empty()) end_record();
  return records;
}

// Case-insensitive lookup of a JSON field by name.
const json* find_field(const json& obj, std::string_view name) {
  const std::string wanted = to_lower(name);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (to_lower(it.key()) == wanted) return &it.value();
  }
  return nullptr;
}

std::string json_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

LoadResult load_persent_jsonl(const std::string& content, std::string_view source) {
  LoadResult result;
  std::istringstream in(content);
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      result.rejected.push_back({row, "malformed record"});
      continue;
    }
    const json* doc = find_field(rec, "DOCUMENT");
    const json* entity = find_field(rec, "TARGET_ENTITY");
    const json* sentiment = find_field(rec, "TRUE_SENTIMENT");
    if (!doc || !entity || !sentiment) {
      result.rejected.push_back({row, "missing DOCUMENT, TARGET_ENTITY or TRUE_SENTIMENT"});
      continue;
    }
    LabeledDocument d;
    const json* idx = find_field(rec, "DOCUMENT_INDEX");
    d.id = idx ? json_to_string(*idx) : "row-" + std::to_string(row);
    d.text = json_to_string(*doc);
    d.target_entity = json_to_string(*entity);
    d.source = std::string(source);
    auto label = parse_label(json_to_string(*sentiment));
    if (!label) {
      result.rejected.push_back({row, "unknown label token: " + json_to_string(*sentiment)});
      continue;
    }
    d.gold_label = *label;
    if (trim(d.text).empty()) {
      result.rejected.push_back({row, "empty document text"});
      continue;
    }
    if (trim(d.target_entity).empty()) {
      result.rejected.push_back({row, "empty target entity"});
      continue;
    }
    result.docs.push_back(std::move(d));
  }
  return result;
}

LoadResult load_persent_delimited(const std::string& content, std::string_view source) {
  LoadResult result;
  const std::string head = content.substr(0, content.find('\n'));
  const char delim = head.find('\t') != std::string::npos ? '\t' : ',';
  auto records = parse_delimited(content, delim);
  if (records.empty()) return result;

  std::map<std::string, size_t> columns;
  for (size_t i = 0; i < records[0].size(); ++i) columns[to_lower(trim(records[0][i]))] = i;
  auto col = [&](std::string_view name) -> std::optional<size_t> {
    auto it = columns.find(to_lower(name));
    if (it == columns.end()) return std::nullopt;
    return it->second;
  };
  auto doc_col = col("DOCUMENT");
  auto entity_col = col("TARGET_ENTITY");
  auto sentiment_col = col("TRUE_SENTIMENT");
  if (!doc_col || !entity_col || !sentiment_col) {
    throw std::runtime_error("header must name DOCUMENT, TARGET_ENTITY and TRUE_SENTIMENT");
  }
  auto id_col = col("DOCUMENT_INDEX");

  for (size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const long row = static_cast<long>(r);
    if (rec.size() == 1 && trim(rec[0]).empty()) continue;  // blank line
    if (rec.size() != records[0].size()) {
      result.rejected.push_back({row, "expected " + std::to_string(records[0].size()) +
                                          " fields, got " + std::to_string(rec.size())});
      continue;
    }
    LabeledDocument d;
    d.id = id_col ? trim(rec[*id_col]) : "row-" + std::to_string(row);
    d.text = rec[*doc_col];
    d.target_entity = rec[*entity_col];
    d.source = std::string(source);
    auto label = parse_label(rec[*sentiment_col]);
    if (!label) {
      result.rejected.push_back({row, "unknown label token: " + trim(rec[*sentiment_col])});
      continue;
    }
    d.gold_label = *label;
    if (trim(d.text).empty()) {
      result.rejected.push_back({row, "empty document text"});
      continue;
    }
    if (trim(d.target_entity).empty()) {
      result.rejected.push_back({row, "empty target entity"});
      continue;
    }
    result.docs.push_back(std::move(d));
  }
  return result;
}

}  // namespace

std::string_view split_source_name(PersentSplit split) {
  switch (split) {
    case PersentSplit::Train: return "persent-train";
    case PersentSplit::Dev: return "persent-dev";
    case PersentSplit::TestStd: return "persent-test-std";
    case PersentSplit::TestFreq: return "persent-test-freq";
  }
  return "persent";
}

LoadResult load_persent(const std::string& path, PersentSplit split) {
  const std::string content = read_file(path);
  const std::string_view source = split_source_name(split);
  if (trim(content).empty()) return {};
  if (looks_like_jsonl(content)) return load_persent_jsonl(content, source);
  return load_persent_delimited(content, source);
}

LoadResult load_wpan(const std::string& path) {
  const std::string content = read_file(path);
  LoadResult result;
  std::istringstream in(content);
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      result.rejected.push_back({row, "malformed record"});
      continue;
    }
    const json* id = find_field(rec, "id");
    const json* article = find_field(rec, "article");
    const json* entity = find_field(rec, "entity");
    const json* label = find_field(rec, "label");
    const json* score = find_field(rec, "score");
    if (!article || !entity) {
      result.rejected.push_back({row, "missing article or entity"});
      continue;
    }
    LabeledDocument d;
    d.id = id ? json_to_string(*id) : "row-" + std::to_string(row);
    d.text = json_to_string(*article);
    d.target_entity = json_to_string(*entity);
    d.source = "wpan";
    if (trim(d.text).empty()) {
      result.rejected.push_back({row, "empty article text"});
      continue;
    }
    if (trim(d.target_entity).empty()) {
      result.rejected.push_back({row, "empty entity field"});
      continue;
    }
    if (label) {
      auto parsed = parse_label(json_to_string(*label));
      if (!parsed) {
        result.rejected.push_back({row, "unknown label token: " + json_to_string(*label)});
        continue;
      }
      d.gold_label = *parsed;
    } else if (score) {
      if (!score->is_number()) {
        result.rejected.push_back({row, "score is not a number"});
        continue;
      }
      std::optional<SentimentLabel> bucketed;
      try {
        bucketed = bucket_score(score->get<double>());
      } catch (const std::domain_error& e) {
        result.rejected.push_back({row, e.what()});
        continue;
      }
      if (!bucketed) {
        ++result.n_excluded;
        continue;
      }
      d.gold_label = *bucketed;
    } else {
      result.rejected.push_back({row, "record has neither label nor score"});
      continue;
    }
    result.docs.push_back(std::move(d));
  }
  return result;
}

std::optional<SentimentLabel> bucket_score(double score) {
  if (!std::isfinite(score) || score < -1.0 || score > 1.0) {
    throw std::domain_error("score outside [-1, 1]: " + std::to_string(score));
  }
  if (score >= 0.6) return SentimentLabel::Positive;
  if (score >= -0.2 && score <= 0.2) return SentimentLabel::Neutral;
  if (score <= -0.6) return SentimentLabel::Negative;
  return std::nullopt;
}

DatasetStats compute_stats(const std::vector<LabeledDocument>& docs) {
  DatasetStats stats;
  std::set<std::string> entities;
  for (const auto& d : docs) {
    switch (d.gold_label) {
      case SentimentLabel::Positive: ++stats.n_positive; break;
      case SentimentLabel::Neutral: ++stats.n_neutral; break;
      case SentimentLabel::Negative: ++stats.n_negative; break;
    }
    entities.insert(trim(d.target_entity));
  }
  stats.n_total = static_cast<long>(docs.size());
  stats.n_unique_entities = static_cast<long>(entities.size());
  return stats;
}

namespace {

// Platform-stable shuffle: mt19937_64 with explicit modulo, so the same
// seed selects the same exemplars everywhere.
void deterministic_shuffle(std::vector<size_t>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace

std::vector<Exemplar> select_exemplars(const std::vector<LabeledDocument>& train,
                                       const ExemplarOptions& options,
                                       const std::map<std::string, std::string>& rationale_table) {
  if (train.empty()) throw std::invalid_argument("exemplar pool is empty");
  if (options.n < 3 || options.n > 4) {
    throw std::invalid_argument("exemplar count must be 3 or 4, got " + std::to_string(options.n));
  }
  if (static_cast<size_t>(options.n) > train.size()) {
    throw std::invalid_argument("exemplar count exceeds pool size");
  }

  std::vector<size_t> picked;
  if (options.stratified) {
    std::array<std::vector<size_t>, 3> by_class;
    for (size_t i = 0; i < train.size(); ++i) {
      by_class[label_index(train[i].gold_label)].push_back(i);
    }
    for (auto& bucket : by_class) deterministic_shuffle(bucket, options.seed);
    std::array<size_t, 3> cursor{};
    int cls = 0;
    while (picked.size() < static_cast<size_t>(options.n)) {
      bool advanced = false;
      for (int tries = 0; tries < 3 && !advanced; ++tries) {
        auto& bucket = by_class[cls];
        if (cursor[cls] < bucket.size()) {
          picked.push_back(bucket[cursor[cls]++]);
          advanced = true;
        }
        cls = (cls + 1) % 3;
      }
      if (!advanced) break;  // all classes exhausted; pool smaller than n was ruled out above
    }
  } else {
    std::vector<size_t> indices(train.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    deterministic_shuffle(indices, options.seed);
    picked.assign(indices.begin(), indices.begin() + options.n);
  }

  std::vector<Exemplar> exemplars;
  exemplars.reserve(picked.size());
  for (size_t idx : picked) {
    const auto& doc = train[idx];
    Exemplar ex;
    ex.id = doc.id;
    ex.context = doc.text;
    ex.target_entity = doc.target_entity;
    ex.label = doc.gold_label;
    if (options.with_rationale) {
      auto it = rationale_table.find(doc.id);
      if (it == rationale_table.end()) {
        throw std::invalid_argument("no rationale for exemplar id: " + doc.id);
      }
      ex.rationale = it->second;
    }
    exemplars.push_back(std::move(ex));
  }
  return exemplars;
}

}  // namespace sentgrid::corpus
