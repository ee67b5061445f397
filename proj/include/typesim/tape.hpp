#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "typesim/util.hpp"

namespace typesim {

enum class TapeCategory { shared_structural, shared_rate, private_a, private_b, env };

enum class Direction { a_to_b, b_to_a };

// A metered bit stream backed by a splitmix64 generator. Identical seeds give
// identical streams on every platform; bits_drawn counts every bit handed out,
// including rejection-sampling overhead in draw_uniform.
class Tape {
 public:
  Tape(TapeCategory cat, std::uint64_t seed)
      : category_(cat), state_(seed), buffer_(0), buffered_(0), bits_drawn_(0) {}

  TapeCategory category() const { return category_; }
  std::uint64_t bits_drawn() const { return bits_drawn_; }

  int draw_bit();
  // Up to 64 bits as an MSB-first value.
  std::uint64_t draw_bits(int k);
  std::vector<std::uint8_t> draw_bit_vec(int k);
  // Unbiased integer in [0, bound) via rejection sampling; 0 bits when bound <= 1.
  std::uint64_t draw_uniform(std::uint64_t bound);
  // Uniform double in [0, 1) from 53 bits.
  double draw_unit();

  void reseed(std::uint64_t seed) {
    state_ = seed;
    buffer_ = 0;
    buffered_ = 0;
  }

 private:
  std::uint64_t next_word();

  TapeCategory category_;
  std::uint64_t state_;
  std::uint64_t buffer_;
  int buffered_;
  std::uint64_t bits_drawn_;
};

struct MessageRec {
  Direction dir;
  std::uint64_t bits;
  std::string label;
};

// Exact bit accounting for one protocol run: every transmitted message with
// its direction, plus randomness totals by category.
struct CostLedger {
  std::vector<MessageRec> messages;
  std::uint64_t shared_structural = 0;
  std::uint64_t shared_rate = 0;
  std::uint64_t private_a = 0;
  std::uint64_t private_b = 0;

  void add_message(Direction dir, std::uint64_t bits, std::string label);
  std::uint64_t comm_total() const;
  // Messages grouped by direction change; a round is a maximal run of
  // consecutive messages in one direction.
  int round_count() const;
  std::uint64_t round_bits(int round) const;
  std::vector<std::pair<Direction, std::uint64_t>> rounds() const;

  void merge_from(const CostLedger& other);
};

// Per-category totals of the given tapes (communication is supplied by the
// protocol layer through add_message).
CostLedger cost_report(const std::vector<const Tape*>& tapes);

}  // namespace typesim
