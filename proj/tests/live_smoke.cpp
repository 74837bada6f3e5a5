// Opt-in smoke run against a real chat-completions endpoint: five documents
// through two-stage prompting, passing when at least four completions parse
// to a label. Skips (exit 0) unless SENTGRID_LIVE_ENDPOINT is set, so it can
// sit in the suite without a live backend. Optional environment:
//   SENTGRID_LIVE_MODEL     model name sent to the endpoint (default local-model)
//   SENTGRID_LIVE_AUTH_ENV  name of the variable holding the bearer token

#include <cstdio>
#include <cstdlib>
#include <string>

#include "sentgrid/backend.hpp"
#include "sentgrid/consistency.hpp"
#include "sentgrid/corpus.hpp"
#include "sentgrid/generation.hpp"
#include "sentgrid/parse.hpp"
#include "sentgrid/prompting.hpp"
#include "test_util.hpp"

using namespace sentgrid;

int main() {
  const char* endpoint = std::getenv("SENTGRID_LIVE_ENDPOINT");
  if (!endpoint || !*endpoint) {
    std::printf("[SKIP] live smoke: SENTGRID_LIVE_ENDPOINT is not set\n");
    return 0;
  }
  const char* model_env = std::getenv("SENTGRID_LIVE_MODEL");
  const char* auth_env = std::getenv("SENTGRID_LIVE_AUTH_ENV");

  const corpus::LoadResult docs =
      corpus::load_wpan((testutil::repo_dir() / "data/fixtures/live5.jsonl").string());
  if (docs.docs.size() != 5 || !docs.rejected.empty()) {
    std::printf("[FAIL] live smoke: fixture live5.jsonl did not load as 5 documents\n");
    return 1;
  }
  const prompting::TemplateSet templates =
      prompting::TemplateSet::load((testutil::repo_dir() / "templates/default").string());

  testutil::TempDir tmp("live-smoke");
  gen::GenerationCache cache(tmp.path() / "cache");
  gen::GenerationService service(&cache);
  gen::HttpBackend::Options options;
  options.endpoint = endpoint;
  options.model = model_env && *model_env ? model_env : "local-model";
  options.auth_env = auth_env ? auth_env : "";
  options.timeout_s = 120;
  service.register_backend(std::make_shared<gen::HttpBackend>("live", options));

  gen::SamplingConfig sampling;
  sampling.mode = gen::DecodeMode::Sampled;
  sampling.top_k = 50;
  sampling.top_p = 0.9;
  sampling.temperature = 0.7;
  sampling.max_new_tokens = 256;
  sampling.seed = 11;

  int parsed = 0;
  for (const corpus::LabeledDocument& doc : docs.docs) {
    consistency::PathRecord path;
    try {
      path = consistency::run_path(service, "live", doc, prompting::StrategyKind::ZeroShotTwoStage,
                                   {}, templates, sampling, prompting::RenderOptions{}, 0);
    } catch (const std::exception& e) {
      std::printf("  %s -> error: %s\n", doc.id.c_str(), e.what());
      continue;
    }
    if (path.ok()) {
      ++parsed;
      std::printf("  %s -> %s\n", doc.id.c_str(), std::string(to_string(*path.parsed.label)).c_str());
    } else {
      std::printf("  %s -> unparsed (%s)%s%s\n", doc.id.c_str(),
                  std::string(to_string(*path.parsed.failure)).c_str(),
                  path.error.empty() ? "" : ": ", path.error.c_str());
    }
  }

  const bool pass = parsed >= 4;
  std::printf("[%s] live smoke: %d/5 completions parsed to a label (need 4)\n",
              pass ? "PASS" : "FAIL", parsed);
  return pass ? 0 : 1;
}
