#include "sentgrid/consistency.hpp"

#include <algorithm>
#include <stdexcept>

#include "sentgrid/digest.hpp"

namespace sentgrid::consistency {

using prompting::PromptBundle;
using prompting::StrategyKind;

VoteResult majority_vote(const std::vector<SentimentLabel>& labels,
                         std::optional<SentimentLabel> greedy_fallback) {
  if (labels.empty()) throw std::invalid_argument("cannot vote over zero labels");

  VoteResult result;
  for (SentimentLabel label : labels) ++result.counts[label_index(label)];
  result.n_valid = static_cast<int>(labels.size());

  const int max_count = *std::max_element(result.counts.begin(), result.counts.end());
  int n_tied = 0;
  for (int c : result.counts) n_tied += (c == max_count);
  result.tie_broken = n_tied > 1;

  if (!result.tie_broken) {
    for (SentimentLabel label : kAllLabels) {
      if (result.counts[label_index(label)] == max_count) result.winner = label;
    }
    return result;
  }
  if (greedy_fallback && result.counts[label_index(*greedy_fallback)] == max_count) {
    result.winner = *greedy_fallback;
    return result;
  }
  for (SentimentLabel label : {SentimentLabel::Neutral, SentimentLabel::Positive,
                               SentimentLabel::Negative}) {
    if (result.counts[label_index(label)] == max_count) {
      result.winner = label;
      return result;
    }
  }
  return result;  // unreachable: some label always holds the max
}

namespace {

std::string first_line(const std::string& text) {
  const auto nl = text.find('\n');
  return nl == std::string::npos ? text : text.substr(0, nl);
}

PromptBundle render_single(const corpus::LabeledDocument& doc, StrategyKind kind,
                           const std::vector<corpus::Exemplar>& exemplars,
                           const prompting::TemplateSet& templates,
                           const prompting::RenderOptions& render) {
  switch (kind) {
    case StrategyKind::ZeroShotStd: return prompting::render_zero_shot(doc, templates, render);
    case StrategyKind::FewShotStd:
      return prompting::render_few_shot(doc, exemplars, templates, render);
    case StrategyKind::FewShotCot: return prompting::render_cot(doc, exemplars, templates, render);
    case StrategyKind::ZeroShotTwoStage: break;
  }
  throw std::logic_error("two-stage prompts are rendered per stage");
}

}  // namespace

PathRecord run_path(gen::GenerationService& service, const std::string& backend_id,
                    const corpus::LabeledDocument& doc, StrategyKind kind,
                    const std::vector<corpus::Exemplar>& exemplars, const prompting::TemplateSet& templates,
                    const gen::SamplingConfig& sampling, const prompting::RenderOptions& render,
                    int sample_index) {
  PathRecord record;
  record.sample_index = sample_index;

  try {
    if (kind == StrategyKind::ZeroShotTwoStage) {
      const PromptBundle stage1 = prompting::render_stage1(doc, templates, render);
      const std::string stage1_text = stage1.text();
      record.stage1_prompt_digest = sha256_hex(stage1_text);
      const gen::GenerationResponse opinions =
          service.generate(backend_id, stage1_text, sampling, sample_index);
      record.stage1_text = opinions.text;
      record.rationale = extract_rationale(opinions.text, first_line(stage1.output_instruction));
      if (record.rationale.empty()) {
        record.parsed = ParsedAnswer::failed(ParseFailure::EmptyResponse);
        return record;
      }

      const PromptBundle stage2 = prompting::render_stage2(doc, record.rationale, templates, render);
      const std::string stage2_text = stage2.text();
      record.prompt_digest = sha256_hex(stage2_text);
      gen::SamplingConfig greedy = sampling;
      greedy.mode = gen::DecodeMode::Greedy;
      const gen::GenerationResponse labeled = service.generate(backend_id, stage2_text, greedy, 0);
      record.text = labeled.text;
      record.parsed = extract_label(labeled.text);
      return record;
    }

    const PromptBundle prompt = render_single(doc, kind, exemplars, templates, render);
    const std::string prompt_text = prompt.text();
    record.prompt_digest = sha256_hex(prompt_text);
    const gen::GenerationResponse response =
        service.generate(backend_id, prompt_text, sampling, sample_index);
    record.text = response.text;
    record.parsed = extract_label(response.text);
    return record;
  } catch (const gen::ContextLengthError&) {
    throw;  // the harness re-renders with a smaller budget
  } catch (const gen::BackendError& e) {
    record.error = e.what();
    record.parsed = ParsedAnswer::failed(ParseFailure::NoLabelFound);
    return record;
  }
}

PredictionResult run_self_consistency(gen::GenerationService& service,
                                      const std::string& backend_id,
                                      const corpus::LabeledDocument& doc,
                                      const prompting::Strategy& strategy,
                                      const std::vector<corpus::Exemplar>& exemplars,
                                      const prompting::TemplateSet& templates,
                                      const gen::SamplingConfig& sampling,
                                      const prompting::RenderOptions& render,
                                      std::optional<SentimentLabel> greedy_fallback) {
  if (!strategy.self_consistency) {
    throw std::invalid_argument("strategy does not request self-consistency");
  }
  if (strategy.n_paths < 1) throw std::invalid_argument("n_paths must be at least 1");
  if (sampling.mode != gen::DecodeMode::Sampled) {
    throw std::invalid_argument("self-consistency needs sampled decoding");
  }

  PredictionResult result;
  result.paths.reserve(strategy.n_paths);
  std::vector<SentimentLabel> labels;
  for (int i = 0; i < strategy.n_paths; ++i) {
    PathRecord path = run_path(service, backend_id, doc, strategy.kind, exemplars, templates,
                               sampling, render, i);
    if (path.ok()) labels.push_back(*path.parsed.label);
    result.paths.push_back(std::move(path));
  }

  if (labels.empty()) {
    result.answer = ParsedAnswer::failed(ParseFailure::NoLabelFound);
    return result;
  }
  VoteResult vote = majority_vote(labels, greedy_fallback);
  vote.n_failed = strategy.n_paths - vote.n_valid;
  result.answer = ParsedAnswer::success(vote.winner);
  result.vote = vote;
  return result;
}

}  // namespace sentgrid::consistency
