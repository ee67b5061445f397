#pragma once

#include <cstdint>
#include <vector>

#include "typesim/dist.hpp"
#include "typesim/seq.hpp"
#include "typesim/tape.hpp"

namespace typesim {

// A discrete memoryless channel: conditional table p(m | inputs), one row per
// input tuple (row-major over input_arities), each row a distribution over
// the output alphabet.
struct Channel {
  std::vector<int> input_arities;
  int output_arity = 1;
  std::vector<double> table;  // rows * output_arity

  Channel() = default;
  Channel(std::vector<int> in_ar, int out_ar, std::vector<double> tab);

  std::size_t rows() const;
  std::size_t row_index(const std::vector<int>& inputs) const;
  // Inputs already flattened row-major over input_arities.
  double prob_flat(std::size_t input_code, int m) const {
    return table[input_code * static_cast<std::size_t>(output_arity) +
                 static_cast<std::size_t>(m)];
  }
  double prob(const std::vector<int>& inputs, int m) const {
    return prob_flat(row_index(inputs), m);
  }

  int sample_flat(std::size_t input_code, Tape& rng) const;
  int sample(const std::vector<int>& inputs, Tape& rng) const;

  static Channel identity(int arity);
  static Channel constant(int input_arity, int output_arity, int symbol);
  static Channel bsc(double flip);
  // Same single-input channel applied to the owner symbol, ignoring extra
  // input coordinates (used to lift presets into interactive rounds).
  static Channel lift(const Channel& base, const std::vector<int>& extra_inputs);
  // Reinterpret the input coordinates with a different factorization of the
  // same row space; the table is unchanged (row-major flattening is
  // associative).
  Channel reshape_inputs(std::vector<int> new_arities) const;
};

// Appends the channel output as a new coordinate of the joint distribution.
// input_coords select which coordinates of `base` feed the channel (in the
// channel's input order).
Dist append_channel(const Dist& base, const Channel& ch, const std::vector<int>& input_coords);

// Exact product-channel output distribution p^n(. | x^n) as a flat table over
// output_arity^n (indexed by seq_code). Caps apply.
std::vector<double> exact_output_distribution(const Channel& ch, const Seq& x);

// Product application of a single-input channel.
Seq apply_channel(const Channel& ch, const Seq& x, Tape& rng);

}  // namespace typesim
