#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace typesim {

// A small pre-verified set of structural-randomness seeds. Sampling one seed
// uniformly replaces the unbounded structural tape; each stored seed
// reproduces a full structural bit stream deterministically.
struct NewmanStrings {
  std::uint64_t s = 0;
  std::vector<std::uint64_t> strings;
  double verified_bound = 0.0;   // max per-input failure fraction observed
  double target_fraction = 0.0;  // acceptance threshold used during selection

  std::string to_json() const;
  static NewmanStrings from_json(const std::string& text);
};

struct NewmanSelectConfig {
  std::uint64_t s = 16;
  double target_fraction = 0.5;
  int max_retries = 8;
  std::uint64_t meta_seed = 1;
  int threads = 0;  // 0 = library default, 1 = serial
};

// Samples s candidate seeds, measures for every input index the fraction of
// seeds on which `fails(seed, input)` is true, and accepts when the maximum
// fraction is within target. Resamples up to max_retries, mirroring the
// probabilistic-method existence argument; throws with the worst offending
// input when the retry limit is exhausted.
NewmanStrings newman_select(const std::function<bool(std::uint64_t, std::size_t)>& fails,
                            std::size_t input_count, const NewmanSelectConfig& cfg);

}  // namespace typesim
