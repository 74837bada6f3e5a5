#pragma once

#include <string>
#include <vector>

#include "sentgrid/corpus.hpp"
#include "sentgrid/templates.hpp"

namespace sentgrid::prompting {

// The four base prompting strategies. Self-consistency is an orthogonal
// flag layered on top of a base strategy.
enum class StrategyKind { ZeroShotStd, ZeroShotTwoStage, FewShotStd, FewShotCot };

std::string_view to_string(StrategyKind kind);

struct Strategy {
  StrategyKind kind{};
  bool self_consistency = false;
  int n_paths = 1;  // sampled reasoning paths when self_consistency is set

  bool is_few_shot() const {
    return kind == StrategyKind::FewShotStd || kind == StrategyKind::FewShotCot;
  }
};

enum class PromptStage { Single, Stage1, Stage2 };

std::string_view to_string(PromptStage stage);

// A fully rendered prompt, kept in its structural pieces. The final text is
// always task definition, exemplar block (if any), query block, output
// instruction, in that order.
struct PromptBundle {
  std::string task_definition;
  std::string exemplar_block;  // empty for zero-shot strategies
  std::string query_block;     // contains the document and the entity phrase
  std::string output_instruction;
  PromptStage stage = PromptStage::Single;

  std::string text() const;
};

struct RenderOptions {
  long char_budget = 12000;  // document truncation budget, in characters
};

// Elision marker inserted where truncation removed paragraphs.
extern const std::string kEllipsisMark;

// The comma-separated label vocabulary as it appears in prompts.
extern const std::string kLabelList;

// Shortens a document to at most `budget` characters: the head of the
// document is kept, then every paragraph containing the entity phrase is
// appended while it fits. Elided stretches are marked with kEllipsisMark.
// The first paragraph containing the entity is never dropped; if that
// paragraph alone exceeds the budget, a window around the first entity
// occurrence is kept instead. Documents within budget pass through
// unchanged.
std::string truncate_document(const std::string& text, const std::string& entity, long budget);

PromptBundle render_zero_shot(const corpus::LabeledDocument& doc, const TemplateSet& templates,
                              const RenderOptions& options = {});

// First stage of two-stage prompting: asks for opinions and cues about the
// entity, not a label.
PromptBundle render_stage1(const corpus::LabeledDocument& doc, const TemplateSet& templates,
                           const RenderOptions& options = {});

// Second stage: predicts the label from the stage-1 rationale, which is
// included verbatim. Throws std::invalid_argument on an empty rationale.
PromptBundle render_stage2(const corpus::LabeledDocument& doc, const std::string& rationale,
                           const TemplateSet& templates, const RenderOptions& options = {});

// Standard few-shot prompt over (context, entity, label) exemplars.
// Exemplars must not carry rationales and at least one is required.
PromptBundle render_few_shot(const corpus::LabeledDocument& doc,
                             const std::vector<corpus::Exemplar>& exemplars,
                             const TemplateSet& templates, const RenderOptions& options = {});

// CoT prompt over (context, entity, rationale, label) exemplars; the
// rationale precedes the label in each rendered segment. Every exemplar
// must carry a rationale.
PromptBundle render_cot(const corpus::LabeledDocument& doc,
                        const std::vector<corpus::Exemplar>& exemplars,
                        const TemplateSet& templates, const RenderOptions& options = {});

}  // namespace sentgrid::prompting
