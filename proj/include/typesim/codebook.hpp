#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "typesim/tape.hpp"

namespace typesim {

// A shared-randomly ordered list of candidate sequences (stored as codes).
// Positions are 0-based; their binary expansion is MSB-first over index_width
// bits, so an nR-bit prefix selects a contiguous block of positions.
struct OrderedCodebook {
  std::vector<std::uint32_t> entries;
  int index_width = 0;

  std::size_t size() const { return entries.size(); }
  std::optional<std::size_t> position_of(std::uint32_t code) const;
  std::vector<std::uint8_t> position_prefix(std::size_t pos, int bits) const;
};

// Fisher-Yates shuffle of the universe driven by tape bits (unbiased via
// rejection sampling); uniform over permutations.
OrderedCodebook random_codebook(std::vector<std::uint32_t> universe, Tape& tape);

OrderedCodebook ordered_codebook(std::vector<std::uint32_t> universe);

// Keeps exactly the entries whose position, written MSB-first in index_width
// bits, starts with `bits`; relative order preserved, positions re-indexed.
OrderedCodebook prefix_filter(const OrderedCodebook& cb, const std::vector<std::uint8_t>& bits);

}  // namespace typesim
