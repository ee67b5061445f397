#pragma once

#include <cstdint>
#include <vector>

#include "typesim/channel.hpp"
#include "typesim/dist.hpp"
#include "typesim/seq.hpp"
#include "typesim/tape.hpp"

namespace typesim {

// A j-round interactive protocol over noisy feedback channels. Round i uses
// channel i-1 (0-based): odd rounds (1st, 3rd, ...) are sent by Alice and
// conditioned on (x, m_<i), even rounds by Bob on (y, m_<i).
struct InteractiveSpec {
  int x_arity = 2;
  int y_arity = 2;
  std::vector<Channel> channels;

  int rounds() const { return static_cast<int>(channels.size()); }
  bool alice_sends(int round) const { return round % 2 == 0; }  // 0-based
  int message_arity(int round) const { return channels[static_cast<std::size_t>(round)].output_arity; }
  std::size_t transcript_cells() const;
  void validate() const;

  // Convenience: per-round single-input presets lifted over the history.
  static InteractiveSpec from_presets(int x_arity, int y_arity,
                                      const std::vector<Channel>& single_input);
};

// Runs the uncompressed reference protocol: each round applies the product
// channel symbol-wise to (sender input, transcript prefix); the feedback copy
// means both parties hold every message.
std::vector<Seq> run_reference_interactive(const InteractiveSpec& spec, const Seq& x, const Seq& y,
                                           Tape& rng);

// Exact transcript distribution p^n(m_1..m_j | x, y) over the product of the
// per-round sequence spaces.
struct TranscriptDist {
  std::vector<std::size_t> round_spaces;  // |M_i|^n per round
  std::vector<double> p;                  // flat over all rounds, row-major

  std::size_t index(const std::vector<std::uint64_t>& round_codes) const;
  std::size_t cells() const { return p.size(); }
};

TranscriptDist exact_transcript_distribution(const InteractiveSpec& spec, const Seq& x,
                                             const Seq& y);

// Joint single-letter distribution on (X, Y, M_1, ..., M_j) induced by the
// input distribution t and the channel chain.
Dist joint_with_transcript(const Dist& t_xy, const InteractiveSpec& spec);

// IC_t = I(M_<=j ; X | Y) + I(M_<=j ; Y | X), computed exactly.
double information_complexity(const Dist& t_xy, const InteractiveSpec& spec);

// Exact maximum of information_complexity over all joint types with
// denominator n -- the prior-free value on that grid.
double prior_free_ic_over_types(const InteractiveSpec& spec, std::int64_t n);

}  // namespace typesim
