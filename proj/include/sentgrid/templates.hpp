#pragma once

#include <map>
#include <string>

namespace sentgrid::prompting {

// A template set is a directory of plain-text files with {name} placeholders.
// Every .txt file in the directory becomes a piece keyed by its basename.
class TemplateSet {
 public:
  // Throws std::runtime_error if the directory is missing or lacks any of
  // the required pieces.
  static TemplateSet load(const std::string& dir);

  const std::string& piece(const std::string& name) const;
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::map<std::string, std::string> pieces_;
};

// Substitutes each {key} with its value in a single pass; substituted values
// are never rescanned. Throws std::invalid_argument if the text references a
// placeholder the map does not provide. Braces that do not form a
// {lowercase_word} token are left as-is.
std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& values);

}  // namespace sentgrid::prompting
