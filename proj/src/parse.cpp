#include "sentgrid/parse.hpp"

#include <cctype>
#include <set>
#include <vector>

namespace sentgrid {

namespace {

constexpr std::string_view kMarker = "sentiment:";

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// Standalone label words within text, in order of appearance.
std::vector<SentimentLabel> label_words(std::string_view text) {
  const std::string lower = to_lower(text);
  std::vector<SentimentLabel> found;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (i > 0 && is_word_char(lower[i - 1])) continue;
    for (SentimentLabel label : kAllLabels) {
      const std::string word = to_lower(to_string(label));
      if (lower.compare(i, word.size(), word) != 0) continue;
      const std::size_t end = i + word.size();
      if (end < lower.size() && is_word_char(lower[end])) continue;
      found.push_back(label);
      break;
    }
  }
  return found;
}

// Position of the marker within the line, or npos. Tolerates leading list
// bullets and markdown emphasis around the keyword.
std::size_t marker_pos(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() &&
         (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == '*' ||
          line[i] == '-' || line[i] == '>' || line[i] == '#' || line[i] == '_')) {
    ++i;
  }
  const std::string head = to_lower(line.substr(i, kMarker.size()));
  return head == kMarker ? i : std::string_view::npos;
}

}  // namespace

std::string_view to_string(ParseFailure failure) {
  switch (failure) {
    case ParseFailure::NoLabelFound: return "no_label_found";
    case ParseFailure::Ambiguous: return "ambiguous";
    case ParseFailure::EmptyResponse: return "empty_response";
  }
  return "unknown";
}

ParsedAnswer ParsedAnswer::success(SentimentLabel label, std::optional<std::string> rationale) {
  ParsedAnswer answer;
  answer.label = label;
  answer.rationale = std::move(rationale);
  return answer;
}

ParsedAnswer ParsedAnswer::failed(ParseFailure reason) {
  ParsedAnswer answer;
  answer.failure = reason;
  return answer;
}

ParsedAnswer extract_label(std::string_view text) {
  if (trim(text).empty()) return ParsedAnswer::failed(ParseFailure::EmptyResponse);

  const std::vector<std::string_view> lines = split_lines(text);

  // Pass 1: the last marker line that names a label decides the answer.
  std::size_t offset = 0;
  std::size_t winner_start = std::string_view::npos;
  std::optional<SentimentLabel> winner;
  bool winner_ambiguous = false;
  for (const std::string_view line : lines) {
    const std::size_t pos = marker_pos(line);
    if (pos != std::string_view::npos) {
      const std::string_view tail = line.substr(pos + kMarker.size());
      const std::vector<SentimentLabel> named = label_words(tail);
      if (!named.empty()) {
        const std::set<SentimentLabel> distinct(named.begin(), named.end());
        winner_start = offset;
        winner_ambiguous = distinct.size() > 1;
        winner = winner_ambiguous ? std::optional<SentimentLabel>{} : std::optional{named.front()};
      }
    }
    offset += line.size() + 1;
  }
  if (winner_start != std::string_view::npos) {
    if (winner_ambiguous) return ParsedAnswer::failed(ParseFailure::Ambiguous);
    const std::string before = trim(text.substr(0, winner_start));
    return ParsedAnswer::success(*winner,
                                 before.empty() ? std::nullopt : std::optional{before});
  }

  // Pass 2: no usable marker; the last standalone label word wins.
  const std::vector<SentimentLabel> anywhere = label_words(text);
  if (!anywhere.empty()) return ParsedAnswer::success(anywhere.back());

  return ParsedAnswer::failed(ParseFailure::NoLabelFound);
}

std::string extract_rationale(std::string_view text, std::string_view echo_line) {
  const std::string echo = trim(echo_line);
  std::vector<std::string_view> lines = split_lines(text);
  std::size_t first = 0;
  while (first < lines.size()) {
    const std::string line = trim(lines[first]);
    if (line.empty() || (!echo.empty() && line == echo)) {
      ++first;
      continue;
    }
    break;
  }
  std::string joined;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (i > first) joined += '\n';
    joined += lines[i];
  }
  return trim(joined);
}

}  // namespace sentgrid
