#include "sentgrid/labels.hpp"

#include <cctype>

namespace sentgrid {

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Positive: return "Positive";
    case SentimentLabel::Neutral: return "Neutral";
    case SentimentLabel::Negative: return "Negative";
  }
  return "?";
}

std::string trim(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::optional<SentimentLabel> parse_label(std::string_view token) {
  const std::string t = to_lower(trim(token));
  if (t == "positive") return SentimentLabel::Positive;
  if (t == "neutral") return SentimentLabel::Neutral;
  if (t == "negative") return SentimentLabel::Negative;
  return std::nullopt;
}

}  // namespace sentgrid
