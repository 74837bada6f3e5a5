#include "sentgrid/generation.hpp"

#include <thread>

#include "sentgrid/digest.hpp"

namespace sentgrid::gen {

std::string cache_key(const std::string& backend_id, const std::string& prompt,
                      const SamplingConfig& sampling, int sample_index) {
  // The prompt is pre-hashed so long documents do not make key derivation
  // scale with article size twice over.
  return sha256_hex(backend_id + "\n" + sha256_hex(prompt) + "\n" + canonical_string(sampling) +
                    "\n" + std::to_string(sample_index));
}

GenerationService::GenerationService(GenerationCache* cache)
    : GenerationService(cache, Options{}) {}

GenerationService::GenerationService(GenerationCache* cache, Options options)
    : cache_(cache), options_(options) {}

void GenerationService::register_backend(std::shared_ptr<Backend> backend) {
  backends_[backend->id()] = std::move(backend);
}

bool GenerationService::has_backend(const std::string& id) const {
  return backends_.count(id) > 0;
}

GenerationResponse GenerationService::generate(const std::string& backend_id,
                                               const std::string& prompt,
                                               const SamplingConfig& sampling, int sample_index) {
  auto it = backends_.find(backend_id);
  if (it == backends_.end()) throw std::invalid_argument("unknown backend: " + backend_id);
  if (prompt.empty()) throw std::invalid_argument("refusing to send an empty prompt");
  if (sampling.mode == DecodeMode::Greedy && sample_index != 0) {
    throw std::invalid_argument("greedy decoding has a single path; sample_index must be 0");
  }
  if (sample_index < 0) throw std::invalid_argument("sample_index must be non-negative");

  const std::string key = cache_key(backend_id, prompt, sampling, sample_index);
  if (cache_) {
    if (auto hit = cache_->lookup(key)) {
      ++cache_hits_;
      return {hit->completion, backend_id, 0, true};
    }
  }

  if (options_.call_budget >= 0 && budget_used_.fetch_add(1) >= options_.call_budget) {
    throw BudgetExhausted("generation call budget of " + std::to_string(options_.call_budget) +
                          " used up");
  }

  Completion completion;
  for (int attempt = 0;; ++attempt) {
    try {
      completion = it->second->complete(prompt, sampling, sample_index);
      break;
    } catch (const TransportError&) {
      if (attempt >= options_.transport_retries) throw;
      std::this_thread::sleep_for(options_.retry_base_delay * (1L << attempt));
    }
  }
  ++backend_calls_;

  if (cache_) {
    CacheRecord record{completion.text, backend_id, sha256_hex(prompt),
                       canonical_string(sampling), sample_index};
    const CacheRecord winner = cache_->store(key, record);
    completion.text = winner.completion;  // first write wins, even if it was not ours
  }
  return {completion.text, backend_id, completion.latency_ms, false};
}

std::vector<PathResult> GenerationService::generate_samples(const std::string& backend_id,
                                                            const std::string& prompt,
                                                            const SamplingConfig& sampling,
                                                            int n) {
  if (sampling.mode != DecodeMode::Sampled) {
    throw std::invalid_argument("multiple paths need sampled decoding");
  }
  if (n < 1) throw std::invalid_argument("path count must be at least 1");

  std::vector<PathResult> results;
  results.reserve(n);
  for (int i = 0; i < n; ++i) {
    PathResult path;
    path.sample_index = i;
    try {
      path.response = generate(backend_id, prompt, sampling, i);
    } catch (const BudgetExhausted&) {
      throw;  // an interrupted run stops; it does not mislabel paths as failed
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      path.error = e.what();
    }
    results.push_back(std::move(path));
  }
  return results;
}

}  // namespace sentgrid::gen
