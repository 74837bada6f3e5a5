#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentgrid/backend.hpp"
#include "sentgrid/cache.hpp"
#include "sentgrid/sampling.hpp"

namespace sentgrid::gen {

// Stable digest over everything that identifies a generation: the backend,
// the exact prompt bytes, the canonical sampling string, and the sample
// index. Any change to any of the four changes the key.
std::string cache_key(const std::string& backend_id, const std::string& prompt,
                      const SamplingConfig& sampling, int sample_index);

struct GenerationResponse {
  std::string text;
  std::string backend_id;
  long latency_ms = 0;
  bool from_cache = false;
};

// One sampled path: either a response or an error message, never both.
struct PathResult {
  int sample_index = 0;
  std::optional<GenerationResponse> response;
  std::string error;

  bool ok() const { return response.has_value(); }
};

// Raised when the configured call budget is used up. Lets tests and the
// harness simulate an interrupted run that is later resumed from cache.
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Front door for all text generation: routes requests to registered
// backends, consults the shared cache first, and retries transport-level
// failures with exponential backoff. Safe to call from multiple threads.
class GenerationService {
 public:
  struct Options {
    int transport_retries = 3;               // extra attempts after the first
    std::chrono::milliseconds retry_base_delay{100};
    long call_budget = -1;                   // backend calls allowed; -1 = unlimited
  };

  explicit GenerationService(GenerationCache* cache);
  GenerationService(GenerationCache* cache, Options options);

  void register_backend(std::shared_ptr<Backend> backend);
  bool has_backend(const std::string& id) const;

  // Single generation. Cache hits return immediately with from_cache set
  // and no backend call. Greedy mode requires sample_index 0.
  GenerationResponse generate(const std::string& backend_id, const std::string& prompt,
                              const SamplingConfig& sampling, int sample_index);

  // n sampled paths with sample_index 0..n-1, returned in index order. A
  // path that fails after retries is recorded as a failed PathResult rather
  // than aborting the others; an exhausted budget still aborts.
  std::vector<PathResult> generate_samples(const std::string& backend_id,
                                           const std::string& prompt,
                                           const SamplingConfig& sampling, int n);

  long backend_calls() const { return backend_calls_.load(); }
  long cache_hits() const { return cache_hits_.load(); }

 private:
  GenerationCache* cache_;  // may be null (caching disabled)
  Options options_;
  std::map<std::string, std::shared_ptr<Backend>> backends_;

  std::atomic<long> backend_calls_{0};
  std::atomic<long> cache_hits_{0};
  std::atomic<long> budget_used_{0};
};

}  // namespace sentgrid::gen
