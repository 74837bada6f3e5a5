#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sentgrid/corpus.hpp"
#include "sentgrid/generation.hpp"
#include "sentgrid/parse.hpp"
#include "sentgrid/prompting.hpp"
#include "sentgrid/templates.hpp"

namespace sentgrid::consistency {

struct VoteResult {
  SentimentLabel winner{};
  std::array<int, 3> counts{};  // indexed by label_index
  int n_valid = 0;
  int n_failed = 0;
  bool tie_broken = false;
};

// Majority vote over parsed path labels. Ties are broken by the greedy
// fallback when it is among the tied labels, otherwise by the fixed
// priority Neutral > Positive > Negative; tie_broken reports that either
// rule fired. Throws std::invalid_argument on an empty collection.
VoteResult majority_vote(const std::vector<SentimentLabel>& labels,
                         std::optional<SentimentLabel> greedy_fallback = {});

// Everything one reasoning path produced, kept for the run transcript.
// Two-stage paths fill the stage1_* fields and rationale; single-prompt
// paths leave them empty.
struct PathRecord {
  int sample_index = 0;
  std::string stage1_prompt_digest;
  std::string stage1_text;
  std::string rationale;
  std::string prompt_digest;  // digest of the label-requesting prompt
  std::string text;           // raw label-stage completion
  ParsedAnswer parsed;
  std::string error;  // backend-level failure, when the path never completed

  bool ok() const { return parsed.ok(); }
};

// Document-level outcome of a strategy: the final answer, the vote that
// produced it (self-consistency only), and every path's record.
struct PredictionResult {
  ParsedAnswer answer;
  std::optional<VoteResult> vote;
  std::vector<PathRecord> paths;
};

// Runs one reasoning path of the given base strategy kind. Two-stage runs
// stage 1 with the given (sampled) config and stage 2 greedily; an empty
// stage-1 rationale fails the path with empty_response. Backend failures
// are recorded on the path; context-length rejections and budget
// exhaustion propagate so the caller can react.
PathRecord run_path(gen::GenerationService& service, const std::string& backend_id,
                    const corpus::LabeledDocument& doc, prompting::StrategyKind kind,
                    const std::vector<corpus::Exemplar>& exemplars, const prompting::TemplateSet& templates,
                    const gen::SamplingConfig& sampling, const prompting::RenderOptions& render,
                    int sample_index);

// Self-consistency: n_paths sampled paths of the strategy's base kind,
// majority vote over the paths that parsed. Paths that failed (backend or
// parse) are excluded from the vote; if every path failed the document's
// answer is a no_label_found parse failure. Requires the strategy's
// self_consistency flag, n_paths ≥ 1, and sampled decoding.
PredictionResult run_self_consistency(gen::GenerationService& service,
                                      const std::string& backend_id,
                                      const corpus::LabeledDocument& doc,
                                      const prompting::Strategy& strategy,
                                      const std::vector<corpus::Exemplar>& exemplars,
                                      const prompting::TemplateSet& templates,
                                      const gen::SamplingConfig& sampling,
                                      const prompting::RenderOptions& render = {},
                                      std::optional<SentimentLabel> greedy_fallback = {});

}  // namespace sentgrid::consistency
