#pragma once

#include <cstdint>
#include <vector>

#include "typesim/util.hpp"

namespace typesim {

struct Alphabet {
  int size = 1;  // symbols are 0 .. size-1
};

// A length-n sequence of symbols from a single (possibly product) alphabet.
struct Seq {
  int arity = 1;
  std::vector<std::uint8_t> sym;

  Seq() = default;
  Seq(int arity_, std::vector<std::uint8_t> symbols) : arity(arity_), sym(std::move(symbols)) {
    check_arg(arity >= 1, "Seq arity must be >= 1");
    for (auto s : sym) check_arg(s < arity, "Seq symbol out of range");
  }

  std::size_t n() const { return sym.size(); }
  bool operator==(const Seq&) const = default;
};

// Lexicographic rank of a sequence within arity^n (MSB-first mixed radix).
std::uint64_t seq_code(const Seq& s);
Seq seq_from_code(std::uint64_t code, int arity, std::size_t n);

// Position-wise tuple of several equal-length sequences, flattened onto the
// product alphabet (row-major over the given order).
Seq flatten_seqs(const std::vector<const Seq*>& parts);
inline Seq flatten_pair(const Seq& a, const Seq& b) { return flatten_seqs({&a, &b}); }

}  // namespace typesim
