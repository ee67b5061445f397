#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "typesim/info_math.hpp"
#include "typesim/types.hpp"

using namespace typesim;

namespace {

Seq bits(std::vector<std::uint8_t> v) { return Seq(2, std::move(v)); }

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("empirical types") {
  JointType t = empirical_type(bits({0, 0, 1, 1}));
  CHECK(t.n == 4);
  CHECK(t.counts == std::vector<std::int64_t>{2, 2});

  JointType j = joint_empirical_type(bits({0, 1}), bits({1, 0}));
  CHECK(j.counts == std::vector<std::int64_t>{0, 1, 1, 0});

  JointType c = empirical_type(bits({1, 1, 1}));
  CHECK(c.counts == std::vector<std::int64_t>{0, 3});

  // Marginalizing the joint type recovers the per-sequence type exactly.
  Seq a = bits({0, 1, 1, 0, 1}), b = bits({1, 1, 0, 0, 0});
  CHECK(joint_empirical_type(a, b).marginal({0}).counts == empirical_type(a).counts);
  CHECK(joint_empirical_type(a, b).marginal({1}).counts == empirical_type(b).counts);
  CHECK_THROWS(joint_empirical_type(a, bits({0, 1})));
}

TEST_CASE("type enumeration") {
  auto types = enumerate_types(2, {2});
  REQUIRE(types.size() == 3);
  CHECK(types[0].counts == std::vector<std::int64_t>{2, 0});
  CHECK(types[1].counts == std::vector<std::int64_t>{1, 1});
  CHECK(types[2].counts == std::vector<std::int64_t>{0, 2});

  CHECK(enumerate_types(4, {2}).size() == binom(5, 1));
  CHECK(count_types(4, 2) == 5);

  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k <= 4; ++k) {
      double cnt = static_cast<double>(count_types(n, static_cast<std::size_t>(k)));
      CHECK(cnt <= std::pow(n + 1.0, k));
    }
}

TEST_CASE("type class sizes and enumeration") {
  JointType point;
  point.n = 5;
  point.arities = {3};
  point.counts = {0, 5, 0};
  CHECK(type_class_size(point) == 1);
  CHECK(enumerate_type_class(point).size() == 1);

  JointType half;
  half.n = 4;
  half.arities = {2};
  half.counts = {2, 2};
  CHECK(type_class_size(half) == 6);

  JointType two;
  two.n = 2;
  two.arities = {2};
  two.counts = {1, 1};
  auto cls = enumerate_type_class(two);
  CHECK(cls == std::vector<std::uint32_t>{1, 2});  // (0,1) and (1,0)

  // Exhaustive: class size matches enumeration and the entropy bounds.
  for (int n = 1; n <= 8; ++n)
    for (const auto& t : enumerate_types(n, {2, 2})) {
      double sz = static_cast<double>(type_class_size(t));
      CHECK(static_cast<std::size_t>(sz) == enumerate_type_class(t).size());
      double h = shannon_entropy(t.to_dist(), {0, 1});
      CHECK(std::log2(sz) <= n * h + 1e-9);
      CHECK(std::log2(sz) >= n * h - 4.0 * std::log2(n + 1.0) - 1e-9);
      CHECK(std::abs(log2_type_class_size(t) - std::log2(sz)) < 1e-9);
    }
}

TEST_CASE("typical membership matches brute force") {
  Seq x = bits({0, 0, 1, 1});
  TypicalSpec exact{joint_empirical_type(x, x).to_dist(), 0.0};
  CHECK(typical_member(x, x, exact));
  CHECK_FALSE(typical_member(bits({0, 0, 0, 1}), x, exact));

  Dist center({2, 2}, {0.4, 0.1, 0.2, 0.3});
  TypicalSpec spec{center, 0.5};
  for (std::uint64_t xi = 0; xi < 16; ++xi)
    for (std::uint64_t yi = 0; yi < 16; ++yi) {
      Seq a = seq_from_code(xi, 2, 4), b = seq_from_code(yi, 2, 4);
      JointType t = joint_empirical_type(a, b);
      double l1 = 0.0;
      for (std::size_t c = 0; c < 4; ++c)
        l1 += std::abs(t.counts[c] / 4.0 - center.p[c]);
      CHECK(typical_member(a, b, spec) == (l1 <= 0.5 + 1e-12));
    }

  // Monotone in delta.
  Tape env(TapeCategory::env, 3);
  for (int i = 0; i < 200; ++i) {
    Seq a = seq_from_code(env.draw_uniform(64), 2, 6);
    Seq b = seq_from_code(env.draw_uniform(64), 2, 6);
    TypicalSpec s1{center, 0.3}, s2{center, 0.6};
    if (typical_member(a, b, s1)) CHECK(typical_member(a, b, s2));
  }
}

TEST_CASE("conditional type classes") {
  // Trivial side alphabet: conditioning is vacuous.
  JointType triv;
  triv.n = 4;
  triv.arities = {2, 1};
  triv.counts = {2, 2};
  Seq y1(1, {0, 0, 0, 0});
  CHECK(conditional_type_class(triv, y1, 2).size() == type_class_size(triv.marginal({0})));

  // Product type: the class factorizes per y-symbol group, giving exactly
  // |T_xy| / |T_y| elements (the partition identity), not the marginal class.
  JointType prod;
  prod.n = 4;
  prod.arities = {2, 2};
  prod.counts = {1, 1, 1, 1};
  Seq y = bits({0, 1, 0, 1});
  auto cls = conditional_type_class(prod, y, 2);
  CHECK(cls.size() == type_class_size(prod) / type_class_size(prod.marginal({1})));

  // Identity coupling: the only compatible x is y itself.
  JointType diag;
  diag.n = 4;
  diag.arities = {2, 2};
  diag.counts = {2, 0, 0, 2};
  auto one = conditional_type_class(diag, y, 2);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == seq_code(y));

  CHECK_THROWS(conditional_type_class(diag, bits({0, 0, 0, 1}), 2));

  // Partition identity at n=6 for every binary joint type.
  for (const auto& t : enumerate_types(6, {2, 2})) {
    JointType ty = t.marginal({1});
    Seq yy(2, {});
    for (int s = 0; s < 2; ++s)
      for (std::int64_t k = 0; k < ty.counts[static_cast<std::size_t>(s)]; ++k)
        yy.sym.push_back(static_cast<std::uint8_t>(s));
    auto cond = conditional_type_class(t, yy, 2);
    CHECK(type_class_size(t) == type_class_size(ty) * cond.size());
  }
}

TEST_CASE("conditionally typical sets") {
  Dist center({2, 2}, {0.25, 0.25, 0.25, 0.25});
  Seq y = bits({0, 0, 0, 1, 1, 1});
  // delta = 0 equals the exact conditional class when y matches the marginal.
  JointType t;
  t.n = 6;
  t.arities = {2, 2};
  t.counts = {2, 1, 1, 2};
  TypicalSpec zero{t.to_dist(), 0.0};
  CHECK(cond_typical_set(zero, y, 2) == conditional_type_class(t, y, 2));

  // delta >= 2 is everything.
  TypicalSpec all{center, 2.0};
  CHECK(cond_typical_set(all, y, 2).size() == 64);

  // Brute-force filter equivalence at delta = 0.3.
  TypicalSpec spec{center, 0.3};
  auto got = cond_typical_set(spec, y, 2);
  std::vector<std::uint32_t> want;
  for (std::uint64_t xi = 0; xi < 64; ++xi) {
    Seq x = seq_from_code(xi, 2, 6);
    if (l1_type_dist(joint_empirical_type(x, y), center) <= 0.3 + 1e-12)
      want.push_back(static_cast<std::uint32_t>(xi));
  }
  CHECK(got == want);
}

TEST_CASE("existential projection of a typical set") {
  Dist center({2, 2}, {0.3, 0.2, 0.1, 0.4});
  for (double delta : {0.0, 0.25, 0.6}) {
    TypicalSpec spec{center, delta};
    for (std::uint64_t xi = 0; xi < 64; ++xi) {
      Seq x = seq_from_code(xi, 2, 6);
      bool brute = false;
      for (std::uint64_t yi = 0; yi < 64 && !brute; ++yi)
        brute = typical_member(x, seq_from_code(yi, 2, 6), spec);
      CHECK(exists_typical_partner(x, spec, 2) == brute);
    }
  }
}

TEST_CASE("existential projection equals the marginal class") {
  // For an exact joint type, { x : exists y with (x, y) of type t } is
  // exactly the class of t's first marginal.
  for (const auto& t : enumerate_types(6, {2, 2})) {
    JointType tx = t.marginal({0});
    std::set<std::uint32_t> via_exists;
    for (std::uint64_t yi = 0; yi < 64; ++yi) {
      Seq y = seq_from_code(yi, 2, 6);
      if (empirical_type(y).counts != t.marginal({1}).counts) continue;
      for (std::uint32_t xc : conditional_type_class(t, y, 2)) via_exists.insert(xc);
    }
    auto marg = enumerate_type_class(tx);
    std::set<std::uint32_t> want(marg.begin(), marg.end());
    CHECK(via_exists == want);
  }
}

TEST_CASE("channel typical membership matches brute-force search") {
  Channel ch = Channel::bsc(0.25);
  Dist center({2, 2}, {0.4, 0.1, 0.1, 0.4});
  ChannelTypicalSpec spec{center, 0.5, &ch, 0.8};
  std::size_t n = 6;
  Tape env(TapeCategory::env, 9);
  int sender_hits = 0, receiver_hits = 0;
  for (int rep = 0; rep < 250; ++rep) {
    Seq a = seq_from_code(env.draw_uniform(64), 2, n);
    // Mix channel-drawn messages (likely members) with uniform ones.
    Seq m = rep % 2 == 0 ? apply_channel(ch, a, env) : seq_from_code(env.draw_uniform(64), 2, n);
    bool brute_sender = false, brute_receiver = false;
    for (std::uint64_t oi = 0; oi < 64; ++oi) {
      Seq other = seq_from_code(oi, 2, n);
      brute_sender = brute_sender || channel_typical_member_triple(m, a, other, spec);
      brute_receiver = brute_receiver || channel_typical_member_triple(m, other, a, spec);
    }
    CHECK(channel_typical_member_sender(m, a, spec, 2) == brute_sender);
    CHECK(channel_typical_member_receiver(m, a, spec, 2) == brute_receiver);
    sender_hits += brute_sender ? 1 : 0;
    receiver_hits += brute_receiver ? 1 : 0;
  }
  // The comparison must exercise both outcomes.
  CHECK(sender_hits > 0);
  CHECK(sender_hits < 250);
  CHECK(receiver_hits > 0);
}

TEST_CASE("sender set trivial witnesses") {
  // A message of exactly the channel-typical type, with an exactly typical
  // pair, is a member for any radii.
  Channel ident = Channel::identity(2);
  Seq x = bits({0, 0, 1, 1});
  Dist center = joint_empirical_type(x, x).to_dist();
  ChannelTypicalSpec spec{center, 0.0, &ident, 0.0};
  CHECK(channel_typical_member_sender(x, x, spec, 2));  // m = x under identity
  CHECK(channel_typical_member_receiver(x, x, spec, 2));
  // Inconsistent message at zero radii is not.
  CHECK_FALSE(channel_typical_member_sender(bits({1, 0, 1, 1}), x, spec, 2));
}

TEST_CASE("merged containment") {
  Channel ch = Channel::bsc(0.2);
  Dist center({2, 2}, {0.4, 0.1, 0.2, 0.3});
  ChannelTypicalSpec zero{center, 0.0, &ch, 0.0};
  CHECK(merge_set_check(zero, 2, 2, 4));
  for (double d : {0.1, 0.3})
    for (double dp : {0.1, 0.3}) {
      ChannelTypicalSpec spec{center, d, &ch, dp};
      CHECK(merge_set_check(spec, 2, 2, 4));
    }
}

TEST_CASE("receiver set collapses under a near-deterministic channel") {
  Channel ch = Channel::bsc(0.01);
  Seq y = bits({0, 0, 0, 1, 1, 1});
  Dist center = joint_empirical_type(y, y).to_dist();
  ChannelTypicalSpec tight{center, 0.0, &ch, 0.1};
  ChannelTypicalSpec loose{center, 0.0, &ch, 1.0};
  std::size_t tight_cnt = 0, loose_cnt = 0;
  for (std::uint64_t mi = 0; mi < 64; ++mi) {
    Seq m = seq_from_code(mi, 2, 6);
    tight_cnt += channel_typical_member_receiver(m, y, tight, 2) ? 1 : 0;
    loose_cnt += channel_typical_member_receiver(m, y, loose, 2) ? 1 : 0;
  }
  CHECK(tight_cnt < loose_cnt);
  CHECK(tight_cnt >= 1);  // the exact image survives
}

TEST_CASE("typical output probability clears its bound when informative") {
  // Trivial input/side alphabets shrink the polynomial fudge enough for the
  // exponential lower bound to be non-vacuous at n=16; verify it against the
  // exact channel-output probability of the conditionally typical set.
  const std::size_t n = 16;
  const double dp = 1.2;
  Channel ch({1}, 2, {0.7, 0.3});
  Dist center({1, 1}, {1.0});
  ChannelTypicalSpec spec{center, 0.0, &ch, dp};
  Seq x(1, std::vector<std::uint8_t>(n, 0));
  Seq y(1, std::vector<std::uint8_t>(n, 0));
  double prob = 0.0;
  for (std::uint64_t mi = 0; mi < (1ull << n); ++mi) {
    Seq m = seq_from_code(mi, 2, n);
    if (!channel_typical_member_triple(m, x, y, spec)) continue;
    double p = 1.0;
    for (auto s : m.sym) p *= ch.prob_flat(0, s);
    prob += p;
  }
  double bound = std::exp2(-static_cast<double>(n) * dp * dp / (2.0 * std::log(2.0)) +
                           2.0 * 2.0 * 1.0 * 1.0 * std::log2(n + 1.0));
  REQUIRE(bound < 1.0);  // the regime this test exists for
  CHECK(prob >= 1.0 - bound);
  CHECK(prob <= 1.0 + 1e-9);
}

TEST_CASE("enumeration caps are enforced") {
  JointType big;
  big.n = 40;
  big.arities = {2};
  big.counts = {20, 20};
  CHECK_THROWS(enumerate_type_class(big));
  CHECK_THROWS(enumerate_types(40, {2, 2, 2, 2}));
}
