#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentgrid/labels.hpp"

namespace sentgrid::corpus {

// One news article with the entity it is judged against and the gold label.
struct LabeledDocument {
  std::string id;
  std::string text;           // full article body
  std::string target_entity;  // entity surface phrase, non-empty
  SentimentLabel gold_label{};
  std::string source;  // persent-train | persent-dev | persent-test-std | persent-test-freq | wpan

  bool operator==(const LabeledDocument&) const = default;
};

struct DatasetStats {
  long n_positive = 0;
  long n_neutral = 0;
  long n_negative = 0;
  long n_total = 0;
  long n_unique_entities = 0;

  bool operator==(const DatasetStats&) const = default;
};

// One few-shot demonstration. rationale is present iff the exemplar is used
// for CoT prompting.
struct Exemplar {
  std::string id;
  std::string context;
  std::string target_entity;
  SentimentLabel label{};
  std::optional<std::string> rationale;

  bool operator==(const Exemplar&) const = default;
};

enum class PersentSplit { Train, Dev, TestStd, TestFreq };

std::string_view split_source_name(PersentSplit split);

// A record that failed row-level validation. Loading continues past it.
struct RowError {
  long row = 0;  // 1-based data record number
  std::string reason;
};

struct LoadResult {
  std::vector<LabeledDocument> docs;
  std::vector<RowError> rejected;
  // Score-labeled records whose score fell between the class ranges; they
  // are dropped from the output, not errors.
  long n_excluded = 0;
};

// Loads a PerSenT-style file. Accepts delimited text (comma or tab, with a
// header row naming DOCUMENT, TARGET_ENTITY, TRUE_SENTIMENT and optionally
// DOCUMENT_INDEX, TITLE, MASKED_DOCUMENT and paragraph sentiment columns) or
// record-per-line JSON with the same field names. Throws std::runtime_error
// for a missing or structurally unusable file; bad rows are reported in
// LoadResult::rejected.
LoadResult load_persent(const std::string& path, PersentSplit split);

// Loads a WPAN-style record-per-line JSON file with fields
// {id, article, entity, label} or {id, article, entity, score}. When score
// is present the label is derived with bucket_score and out-of-range-class
// records are counted in n_excluded.
LoadResult load_wpan(const std::string& path);

// Buckets an entity sentiment score in [-1, +1] into a class:
//   [0.6, 1.0] -> Positive, [-0.2, 0.2] -> Neutral, [-1.0, -0.6] -> Negative,
// all endpoints inclusive. Scores between those ranges return nullopt
// (the record is excluded, not an error). Non-finite scores or scores
// outside [-1, +1] throw std::domain_error.
std::optional<SentimentLabel> bucket_score(double score);

// Per-class counts plus distinct target entities (exact string match after
// trimming surrounding whitespace).
DatasetStats compute_stats(const std::vector<LabeledDocument>& docs);

struct ExemplarOptions {
  int n = 3;  // number of exemplars, 3 or 4
  std::uint64_t seed = 0;
  bool with_rationale = false;
  bool stratified = false;  // round-robin over classes instead of uniform draw
};

// Draws n exemplars from the training documents. Deterministic in
// (train order, options); the same seed always yields the same exemplars in
// the same order. When with_rationale is set, every selected document id
// must appear in rationale_table. Throws std::invalid_argument on violated
// preconditions, naming the offending id where applicable.
std::vector<Exemplar> select_exemplars(const std::vector<LabeledDocument>& train,
                                       const ExemplarOptions& options,
                                       const std::map<std::string, std::string>& rationale_table = {});

}  // namespace sentgrid::corpus
