#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace typesim {

// Hard cap on any exhaustive enumeration (sequence universes, type classes,
// transcript spaces). Checked up front so failures are explicit.
inline constexpr std::uint64_t kEnumCap = 1ull << 20;

inline void check_arg(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline void check_state(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

// Number of bits needed to index v items: smallest w with 2^w >= v (0 for v <= 1).
inline int ceil_log2(std::uint64_t v) {
  if (v <= 1) return 0;
  int w = 0;
  std::uint64_t c = 1;
  while (c < v) {
    c <<= 1;
    ++w;
    if (w >= 64) break;
  }
  return w;
}

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic seed derivation for independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(master ^ mix64(a)) ^ mix64(b + 0x517cc1b727220a95ull));
}

}  // namespace typesim
