#include "sentgrid/prompting.hpp"

#include <algorithm>
#include <stdexcept>

namespace sentgrid::prompting {

const std::string kEllipsisMark = "[…]";
const std::string kLabelList = "Positive, Neutral, Negative";

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::ZeroShotStd: return "zero_shot_std";
    case StrategyKind::ZeroShotTwoStage: return "zero_shot_two_stage";
    case StrategyKind::FewShotStd: return "few_shot_std";
    case StrategyKind::FewShotCot: return "few_shot_cot";
  }
  return "?";
}

std::string_view to_string(PromptStage stage) {
  switch (stage) {
    case PromptStage::Single: return "single";
    case PromptStage::Stage1: return "stage1";
    case PromptStage::Stage2: return "stage2";
  }
  return "?";
}

std::string PromptBundle::text() const {
  std::string out = task_definition;
  if (!exemplar_block.empty()) {
    out += "\n\n";
    out += exemplar_block;
  }
  out += "\n\n";
  out += query_block;
  out += "\n\n";
  out += output_instruction;
  return out;
}

namespace {

std::string rtrim_copy(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

std::vector<std::string> split_paragraphs(const std::string& text) {
  std::vector<std::string> paragraphs;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t next = text.find("\n\n", pos);
    if (next == std::string::npos) next = text.size();
    std::string para = text.substr(pos, next - pos);
    if (!trim(para).empty()) paragraphs.push_back(std::move(para));
    pos = next;
    while (pos < text.size() && text[pos] == '\n') ++pos;
  }
  return paragraphs;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  const std::string h = to_lower(haystack);
  const std::string n = to_lower(needle);
  return h.find(n) != std::string::npos;
}

// Joins the selected paragraphs in document order, marking every elided
// stretch (including a trailing one) with the ellipsis token.
std::string assemble(const std::vector<std::string>& paragraphs, const std::vector<bool>& keep) {
  std::string out;
  bool pending_gap = false;
  auto append_block = [&](const std::string& block) {
    if (!out.empty()) out += "\n\n";
    out += block;
  };
  for (size_t i = 0; i < paragraphs.size(); ++i) {
    if (keep[i]) {
      if (pending_gap) append_block(kEllipsisMark);
      pending_gap = false;
      append_block(paragraphs[i]);
    } else {
      pending_gap = true;
    }
  }
  if (pending_gap) append_block(kEllipsisMark);
  return out;
}

}  // namespace

std::string truncate_document(const std::string& text, const std::string& entity, long budget) {
  if (budget <= 0) throw std::invalid_argument("character budget must be positive");
  if (static_cast<long>(text.size()) <= budget) return text;
  const long min_budget = static_cast<long>(2 * kEllipsisMark.size()) + 16;
  if (budget < min_budget) return text.substr(0, static_cast<size_t>(budget));

  auto paragraphs = split_paragraphs(text);
  std::vector<bool> keep(paragraphs.size(), false);

  long first_entity = -1;
  for (size_t i = 0; i < paragraphs.size(); ++i) {
    if (contains_ci(paragraphs[i], entity)) {
      first_entity = static_cast<long>(i);
      break;
    }
  }

  auto assembled_size = [&]() { return static_cast<long>(assemble(paragraphs, keep).size()); };

  // The first entity-bearing paragraph is kept unconditionally. If it alone
  // blows the budget, keep a window around the first entity occurrence.
  if (first_entity >= 0) {
    keep[first_entity] = true;
    if (assembled_size() > budget) {
      const std::string& para = paragraphs[first_entity];
      const size_t hit = to_lower(para).find(to_lower(entity));
      const long window = budget - 2 * static_cast<long>(kEllipsisMark.size()) - 4;
      long begin = static_cast<long>(hit) - window / 4;
      begin = std::max(begin, 0L);
      begin = std::min(begin, static_cast<long>(para.size()) - window);
      begin = std::max(begin, 0L);
      std::string out = kEllipsisMark + "\n\n" +
                        para.substr(static_cast<size_t>(begin),
                                    static_cast<size_t>(std::min(window, static_cast<long>(para.size())))) +
                        "\n\n" + kEllipsisMark;
      return out;
    }
  }

  // Head paragraphs in order, stopping at the first that no longer fits.
  for (size_t i = 0; i < paragraphs.size(); ++i) {
    if (keep[i]) continue;
    keep[i] = true;
    if (assembled_size() > budget) {
      keep[i] = false;
      break;
    }
  }
  // Then every remaining entity-bearing paragraph that still fits.
  for (size_t i = 0; i < paragraphs.size(); ++i) {
    if (keep[i] || !contains_ci(paragraphs[i], entity)) continue;
    keep[i] = true;
    if (assembled_size() > budget) keep[i] = false;
  }

  std::string out = assemble(paragraphs, keep);
  if (static_cast<long>(out.size()) > budget) out = out.substr(0, static_cast<size_t>(budget));
  return out;
}

namespace {

std::string render_piece(const TemplateSet& templates, const std::string& name,
                         const std::map<std::string, std::string>& values) {
  return rtrim_copy(render_template(templates.piece(name), values));
}

std::string render_exemplar_block(const std::vector<corpus::Exemplar>& exemplars,
                                  const std::string& item_piece, const TemplateSet& templates,
                                  const RenderOptions& options) {
  std::string block;
  for (const auto& ex : exemplars) {
    std::map<std::string, std::string> values = {
        {"document", truncate_document(ex.context, ex.target_entity, options.char_budget)},
        {"entity", ex.target_entity},
        {"label", std::string(to_string(ex.label))},
    };
    if (ex.rationale) values["rationale"] = *ex.rationale;
    if (!block.empty()) block += "\n\n";
    block += render_piece(templates, item_piece, values);
  }
  return block;
}

}  // namespace

PromptBundle render_zero_shot(const corpus::LabeledDocument& doc, const TemplateSet& templates,
                              const RenderOptions& options) {
  PromptBundle bundle;
  bundle.stage = PromptStage::Single;
  bundle.task_definition = render_piece(templates, "task_definition", {});
  bundle.query_block = render_piece(
      templates, "query_zero_shot_std",
      {{"document", truncate_document(doc.text, doc.target_entity, options.char_budget)},
       {"entity", doc.target_entity},
       {"labels", kLabelList}});
  bundle.output_instruction = render_piece(templates, "instruction_label", {});
  return bundle;
}

PromptBundle render_stage1(const corpus::LabeledDocument& doc, const TemplateSet& templates,
                           const RenderOptions& options) {
  PromptBundle bundle;
  bundle.stage = PromptStage::Stage1;
  bundle.task_definition = render_piece(templates, "task_definition", {});
  bundle.query_block = render_piece(
      templates, "query_stage1",
      {{"document", truncate_document(doc.text, doc.target_entity, options.char_budget)},
       {"entity", doc.target_entity}});
  bundle.output_instruction = render_piece(templates, "instruction_rationale", {});
  return bundle;
}

PromptBundle render_stage2(const corpus::LabeledDocument& doc, const std::string& rationale,
                           const TemplateSet& templates, const RenderOptions&) {
  if (trim(rationale).empty()) {
    throw std::invalid_argument("stage-2 prompt requires a non-empty rationale");
  }
  PromptBundle bundle;
  bundle.stage = PromptStage::Stage2;
  bundle.task_definition = render_piece(templates, "task_definition", {});
  bundle.query_block = render_piece(templates, "query_stage2",
                                    {{"entity", doc.target_entity},
                                     {"rationale", rationale},
                                     {"labels", kLabelList}});
  bundle.output_instruction = render_piece(templates, "instruction_label", {});
  return bundle;
}

PromptBundle render_few_shot(const corpus::LabeledDocument& doc,
                             const std::vector<corpus::Exemplar>& exemplars,
                             const TemplateSet& templates, const RenderOptions& options) {
  if (exemplars.empty()) throw std::invalid_argument("few-shot prompt requires exemplars");
  for (const auto& ex : exemplars) {
    if (ex.rationale) {
      throw std::invalid_argument("standard few-shot exemplar " + ex.id +
                                  " unexpectedly carries a rationale");
    }
  }
  PromptBundle bundle;
  bundle.stage = PromptStage::Single;
  bundle.task_definition = render_piece(templates, "task_definition", {});
  bundle.exemplar_block = render_exemplar_block(exemplars, "exemplar_item_std", templates, options);
  bundle.query_block = render_piece(
      templates, "query_few_shot",
      {{"document", truncate_document(doc.text, doc.target_entity, options.char_budget)},
       {"entity", doc.target_entity},
       {"labels", kLabelList}});
  bundle.output_instruction = render_piece(templates, "instruction_label", {});
  return bundle;
}

PromptBundle render_cot(const corpus::LabeledDocument& doc,
                        const std::vector<corpus::Exemplar>& exemplars,
                        const TemplateSet& templates, const RenderOptions& options) {
  if (exemplars.empty()) throw std::invalid_argument("CoT prompt requires exemplars");
  for (const auto& ex : exemplars) {
    if (!ex.rationale || trim(*ex.rationale).empty()) {
      throw std::invalid_argument("CoT exemplar " + ex.id + " is missing a rationale");
    }
  }
  PromptBundle bundle;
  bundle.stage = PromptStage::Single;
  bundle.task_definition = render_piece(templates, "task_definition", {});
  bundle.exemplar_block = render_exemplar_block(exemplars, "exemplar_item_cot", templates, options);
  bundle.query_block = render_piece(
      templates, "query_few_shot",
      {{"document", truncate_document(doc.text, doc.target_entity, options.char_budget)},
       {"entity", doc.target_entity},
       {"labels", kLabelList}});
  bundle.output_instruction = render_piece(templates, "instruction_label", {});
  return bundle;
}

}  // namespace sentgrid::prompting
