#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "sentgrid/sampling.hpp"

namespace sentgrid::gen {

struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Connection-level failure; eligible for retry with backoff.
struct TransportError : BackendError {
  using BackendError::BackendError;
};

// The endpoint answered with an error status.
struct EndpointError : BackendError {
  EndpointError(int status_, const std::string& message)
      : BackendError(message), status(status_) {}
  int status = 0;
};

// The prompt exceeds the endpoint's context window. Surfaced distinctly so
// the caller can re-render with a smaller character budget.
struct ContextLengthError : BackendError {
  using BackendError::BackendError;
};

struct Completion {
  std::string text;
  long latency_ms = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual const std::string& id() const = 0;
  virtual Completion complete(const std::string& prompt, const SamplingConfig& sampling,
                              int sample_index) = 0;
};

// Deterministic scripted backend for tests and fixture experiments.
//
// The script file is record-per-line JSON:
//   {"prompt_digest": H, "sample_index": I, "completion": TEXT}
//       exact completion for that (prompt sha-256, sample index) pair
//   {"prompt_digest": H, "sample_index": I, "completion": TEXT, "fail_times": K}
//       as above, but the first K calls raise a transport error
//   {"derive_unscripted": true, "salt": S}
//       unscripted pairs get a completion derived from
//       sha256(S "|" digest "|" index); without this record they error
//   {"context_limit": N}
//       prompts longer than N characters are rejected as context overflow
class MockBackend : public Backend {
 public:
  MockBackend(std::string id, const std::string& script_path);

  const std::string& id() const override { return id_; }
  Completion complete(const std::string& prompt, const SamplingConfig& sampling,
                      int sample_index) override;

  // Completed (non-failing) invocations, across all threads.
  long calls() const { return calls_.load(); }

  // The procedural completion used for unscripted pairs. Pure; exposed so
  // tests can predict scripted labels.
  static std::string derived_completion(const std::string& prompt_digest, int sample_index,
                                        const std::string& salt);

 private:
  struct Entry {
    std::string completion;
    int fail_times = 0;
  };

  std::string id_;
  std::map<std::pair<std::string, int>, Entry> exact_;
  bool derive_unscripted_ = false;
  std::string salt_;
  long context_limit_ = 0;

  std::mutex mu_;  // guards failures_seen_
  std::map<std::pair<std::string, int>, int> failures_seen_;
  std::atomic<long> calls_{0};
};

// Chat-completions HTTP backend. Sends the prompt as a single user message
// to {endpoint}, which must accept the de-facto JSON request shape
// {model, messages, max_tokens, ...}. Sampling fields the endpoint honors:
// greedy maps to temperature 0; sampled mode sends temperature, top_p,
// top_k, and seed. The auth token is read from the named environment
// variable at request time and never stored.
class HttpBackend : public Backend {
 public:
  struct Options {
    std::string endpoint;  // e.g. http://host:8000/v1/chat/completions
    std::string model;
    std::string auth_env;  // environment variable holding the bearer token
    int timeout_s = 60;
  };

  HttpBackend(std::string id, Options options);

  const std::string& id() const override { return id_; }
  Completion complete(const std::string& prompt, const SamplingConfig& sampling,
                      int sample_index) override;

 private:
  std::string id_;
  Options options_;
};

}  // namespace sentgrid::gen
