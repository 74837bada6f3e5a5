#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace sentgrid {

// The three sentiment classes, in the fixed order used by every prompt,
// confusion matrix, and result table in this project.
enum class SentimentLabel { Positive = 0, Neutral = 1, Negative = 2 };

inline constexpr std::array<SentimentLabel, 3> kAllLabels = {
    SentimentLabel::Positive, SentimentLabel::Neutral, SentimentLabel::Negative};

inline constexpr int label_index(SentimentLabel label) { return static_cast<int>(label); }

std::string_view to_string(SentimentLabel label);

// Case-insensitive parse of a label token; surrounding whitespace is ignored.
std::optional<SentimentLabel> parse_label(std::string_view token);

// Trims ASCII whitespace from both ends.
std::string trim(std::string_view text);

std::string to_lower(std::string_view text);

}  // namespace sentgrid
