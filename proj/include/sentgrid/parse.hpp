#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sentgrid/labels.hpp"

namespace sentgrid {

enum class ParseFailure { NoLabelFound, Ambiguous, EmptyResponse };

std::string_view to_string(ParseFailure failure);

// Result of reading a completion: exactly one of label / failure is set.
// rationale carries any reasoning text that preceded the answer marker.
struct ParsedAnswer {
  std::optional<SentimentLabel> label;
  std::optional<std::string> rationale;
  std::optional<ParseFailure> failure;

  bool ok() const { return label.has_value(); }

  static ParsedAnswer success(SentimentLabel label, std::optional<std::string> rationale = {});
  static ParsedAnswer failed(ParseFailure reason);
};

// Total and deterministic: every input maps to a label or a failure value,
// never an exception.
//
// Resolution order:
//   1. Marker lines — lines reading "Sentiment: …" (case-insensitive, common
//      bullet/emphasis decorations ignored). The last marker line naming at
//      least one label wins; if that line names two or more distinct labels
//      the answer is ambiguous. Text before the winning marker becomes the
//      rationale.
//   2. Otherwise the last standalone label word anywhere in the text wins
//      (completions often restate candidates before concluding, so the final
//      mention best approximates the conclusion).
//   3. Otherwise no_label_found; empty or whitespace-only input is
//      empty_response.
ParsedAnswer extract_label(std::string_view text);

// Trims the completion and drops any leading lines that merely echo
// echo_line (compared after trimming). All leading echoes are removed in one
// pass, so the operation is idempotent. An empty result is legitimate and
// signals that the stage produced no usable rationale.
std::string extract_rationale(std::string_view text, std::string_view echo_line = {});

}  // namespace sentgrid
