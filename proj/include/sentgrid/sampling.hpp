#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sentgrid::gen {

enum class DecodeMode { Greedy, Sampled };

std::string_view to_string(DecodeMode mode);

// Decoding parameters. Greedy mode ignores top_k/top_p/temperature. Sampled
// mode keeps them inside the reference ranges (top_k in [50, 90], top_p in
// [0.9, 0.95], temperature exactly 0.7) unless allow_out_of_range
// acknowledges a deliberate departure.
struct SamplingConfig {
  DecodeMode mode = DecodeMode::Greedy;
  int top_k = 50;
  double top_p = 0.9;
  double temperature = 0.7;
  int max_new_tokens = 256;
  std::uint64_t seed = 0;
  bool allow_out_of_range = false;
};

// Range violations, empty when acceptable. Greedy configs never violate.
std::vector<std::string> validate(const SamplingConfig& config);

// Canonical one-line form used in cache keys. Greedy mode omits the
// sampling parameters it ignores, so their values cannot split the key.
std::string canonical_string(const SamplingConfig& config);

}  // namespace sentgrid::gen
