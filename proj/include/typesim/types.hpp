#pragma once

#include <cstdint>
#include <vector>

#include "typesim/channel.hpp"
#include "typesim/dist.hpp"
#include "typesim/seq.hpp"

namespace typesim {

// An empirical joint type: integer counts with denominator n over a product
// alphabet. A joint type over (X, Y) is stored as a type over the flattened
// product cell alphabet together with the per-coordinate arities.
struct JointType {
  std::int64_t n = 0;
  std::vector<int> arities;
  std::vector<std::int64_t> counts;

  std::size_t cells() const { return counts.size(); }
  Dist to_dist() const;
  JointType marginal(const std::vector<int>& coords) const;
  bool operator==(const JointType&) const = default;
};

JointType empirical_type(const Seq& s);
JointType joint_empirical_type(const std::vector<const Seq*>& seqs);
inline JointType joint_empirical_type(const Seq& a, const Seq& b) {
  return joint_empirical_type({&a, &b});
}

// All types with denominator n over the given arities; first cell count
// decreasing, matching composition order (2,0),(1,1),(0,2).
std::vector<JointType> enumerate_types(std::int64_t n, const std::vector<int>& arities);
std::uint64_t count_types(std::int64_t n, std::size_t cells);

// Exact multinomial n! / prod(counts!). Throws if it does not fit in 64 bits.
std::uint64_t type_class_size(const JointType& t);
double log2_type_class_size(const JointType& t);

// All sequences over the flattened cell alphabet with exactly these counts,
// in lexicographic order, as seq codes. Cap applies.
std::vector<std::uint32_t> enumerate_type_class(const JointType& t);

// l1 distance between a type (counts/n) and a center distribution on the same
// cells. Ties at exactly delta count as inside.
double l1_type_dist(const JointType& t, const Dist& center);
double l1_type_dist(const JointType& a, const JointType& b);

// A typical set T_{center, delta}: all sequences whose type is within l1
// distance delta of the center. The center may have any denominator.
struct TypicalSpec {
  Dist center;
  double delta = 0.0;
};

bool typical_member(const JointType& observed, const TypicalSpec& spec);
bool typical_member(const Seq& a, const Seq& b, const TypicalSpec& spec);

// Exact conditional type class { x : joint type of (x, y) == t }, as x codes.
// Requires y's type to equal t's second marginal.
std::vector<std::uint32_t> conditional_type_class(const JointType& t, const Seq& y, int x_arity);

// Existential projection of a typical set: does some y put (x, y) within the
// l1 ball? Searched over integer splits of x's counts across the partner
// alphabet; for delta = 0 this coincides with membership in the class of the
// center's first marginal, for delta > 0 it need not.
bool exists_typical_partner(const Seq& x, const TypicalSpec& spec, int y_arity);

// Conditionally delta-typical set { x : || t_{x,y} - center ||_1 <= delta }.
std::vector<std::uint32_t> cond_typical_set(const TypicalSpec& spec, const Seq& y, int x_arity);

// Typical sets driven by a channel p(m|x) around a center on (X, Y):
// a triple (m, x, y) is inside when || t_{x,y} - center ||_1 <= delta and
// || t_{m,x,y} - p * t_{x,y} ||_1 <= delta_prime.
struct ChannelTypicalSpec {
  Dist center_xy;           // on (X, Y)
  double delta = 0.0;       // ball around center_xy
  const Channel* channel;   // p(m | x)
  double delta_prime = 0.0; // ball around p * t_{x,y}
};

bool channel_typical_member_triple(const Seq& m, const Seq& x, const Seq& y,
                                   const ChannelTypicalSpec& spec);

// Sender-side projection: exists y making the triple typical. The search
// fixes the observed (m, x) joint counts and enumerates integer splits of
// each cell across Y.
bool channel_typical_member_sender(const Seq& m, const Seq& x, const ChannelTypicalSpec& spec,
                                   int y_arity);

// Receiver-side projection: exists x, with (m, y) counts fixed and splits
// across X.
bool channel_typical_member_receiver(const Seq& m, const Seq& y, const ChannelTypicalSpec& spec,
                                     int x_arity);

// Exhaustively verifies containment of the channel-typical triple set in the
// plain typical set with center p*center and radius delta+delta_prime.
bool merge_set_check(const ChannelTypicalSpec& spec, int x_arity, int y_arity, std::size_t n);

// Generalized membership used by interactive rounds: sender base S, receiver
// base R and a shared history H known to both sides. The channel reads
// (s, h); the center lives on axes (S, R, H).
struct RoundTypicalSpec {
  Dist center_srh;          // axes [S, R, H]
  double delta = 0.0;
  const Channel* channel;   // p(m | s, h), input arities [S, H] flattened
  double delta_prime = 0.0;
};

bool round_member_sender(const Seq& m, const Seq& s, const Seq& h, const RoundTypicalSpec& spec,
                         int r_arity);
bool round_member_receiver(const Seq& m, const Seq& r, const Seq& h, const RoundTypicalSpec& spec,
                           int s_arity);

}  // namespace typesim
