#include "sentgrid/sampling.hpp"

#include <cmath>
#include <cstdio>

namespace sentgrid::gen {

std::string_view to_string(DecodeMode mode) {
  return mode == DecodeMode::Greedy ? "greedy" : "sampled";
}

std::vector<std::string> validate(const SamplingConfig& config) {
  std::vector<std::string> errors;
  if (config.max_new_tokens <= 0) errors.push_back("max_new_tokens must be positive");
  if (config.mode == DecodeMode::Greedy || config.allow_out_of_range) return errors;
  if (config.top_k < 50 || config.top_k > 90) {
    errors.push_back("top_k " + std::to_string(config.top_k) +
                     " outside [50, 90]; set allow_out_of_range to override");
  }
  if (config.top_p < 0.9 || config.top_p > 0.95) {
    errors.push_back("top_p " + std::to_string(config.top_p) +
                     " outside [0.9, 0.95]; set allow_out_of_range to override");
  }
  if (config.temperature != 0.7) {
    errors.push_back("temperature " + std::to_string(config.temperature) +
                     " differs from 0.7; set allow_out_of_range to override");
  }
  return errors;
}

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string canonical_string(const SamplingConfig& config) {
  std::string out(to_string(config.mode));
  if (config.mode == DecodeMode::Sampled) {
    out += ";k=" + std::to_string(config.top_k);
    out += ";p=" + format_real(config.top_p);
    out += ";T=" + format_real(config.temperature);
  }
  out += ";max=" + std::to_string(config.max_new_tokens);
  // Greedy decoding is deterministic, so the seed cannot influence the
  // completion and must not split the key: repeated runs of a greedy cell
  // reuse each other's generations.
  if (config.mode == DecodeMode::Sampled) out += ";seed=" + std::to_string(config.seed);
  return out;
}

}  // namespace sentgrid::gen
