#include "sentgrid/templates.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sentgrid::prompting {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kRequiredPieces = {
    "task_definition",    "query_zero_shot_std", "query_stage1",
    "query_stage2",       "query_few_shot",      "exemplar_item_std",
    "exemplar_item_cot",  "instruction_label",   "instruction_rationale",
};

}  // namespace

TemplateSet TemplateSet::load(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("unknown template set: " + dir);
  }
  TemplateSet set;
  set.dir_ = dir;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    set.pieces_[path.stem().string()] = buf.str();
  }
  for (const auto& name : kRequiredPieces) {
    if (!set.pieces_.count(name)) {
      throw std::runtime_error("template set " + dir + " is missing " + name + ".txt");
    }
  }
  return set;
}

const std::string& TemplateSet::piece(const std::string& name) const {
  auto it = pieces_.find(name);
  if (it == pieces_.end()) {
    throw std::runtime_error("template set " + dir_ + " has no piece named " + name);
  }
  return it->second;
}

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') {
      out.push_back(text[i]);
      continue;
    }
    size_t end = i + 1;
    while (end < text.size() && (std::islower(static_cast<unsigned char>(text[end])) || text[end] == '_')) {
      ++end;
    }
    if (end >= text.size() || text[end] != '}' || end == i + 1) {
      out.push_back(text[i]);  // not a placeholder token
      continue;
    }
    const std::string name = text.substr(i + 1, end - i - 1);
    auto it = values.find(name);
    if (it == values.end()) {
      throw std::invalid_argument("template references unknown placeholder {" + name + "}");
    }
    out += it->second;
    i = end;
  }
  return out;
}

}  // namespace sentgrid::prompting
