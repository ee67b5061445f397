#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "typesim/info_math.hpp"
#include "typesim/protocols.hpp"
#include "typesim/types.hpp"

using namespace typesim;

namespace {

Seq bits(std::vector<std::uint8_t> v) { return Seq(2, std::move(v)); }

Tapes tapes_for(std::uint64_t trial) { return Tapes::from_seed(0xabcdef, trial); }

Seq random_bits(Tape& env, std::size_t n) {
  Seq s(2, std::vector<std::uint8_t>(n, 0));
  for (auto& v : s.sym) v = static_cast<std::uint8_t>(env.draw_uniform(2));
  return s;
}

}  // namespace

TEST_CASE("estimation exchange") {
  ProtocolParams P;
  P.n = 8;
  P.m_samples = 4;

  // Constant sequences: the estimate is the exact point-mass type.
  Seq x = bits({0, 0, 0, 0, 0, 0, 0, 0});
  Seq y = bits({1, 1, 1, 1, 1, 1, 1, 1});
  Tapes t = tapes_for(1);
  EstimateOutcome e = estimate_joint_type(x, y, P, t);
  CHECK(e.t_tilde.p[1] == doctest::Approx(1.0));
  CHECK(e.ledger.comm_total() == 4 * 1 + 4 * 1);
  CHECK(e.ledger.round_count() == 2);
  CHECK(e.ledger.messages.front().dir == Direction::b_to_a);

  // Identical sequences put all estimated mass on the diagonal.
  Seq z = bits({0, 1, 1, 0, 1, 0, 1, 1});
  Tapes t2 = tapes_for(2);
  EstimateOutcome d = estimate_joint_type(z, z, P, t2);
  CHECK(d.t_tilde.p[1] == doctest::Approx(0.0));
  CHECK(d.t_tilde.p[2] == doctest::Approx(0.0));
  CHECK(d.t_tilde.p[0] + d.t_tilde.p[3] == doctest::Approx(1.0));

  // Power-of-two n: coordinate sampling needs exactly m ceil(log2 n) shared
  // bits (no rejection overhead).
  ProtocolParams P2;
  P2.n = 256;
  P2.m_samples = 50;
  Seq long_x(2, std::vector<std::uint8_t>(256, 0));
  Seq long_y(2, std::vector<std::uint8_t>(256, 1));
  Tapes t3 = tapes_for(3);
  EstimateOutcome e3 = estimate_joint_type(long_x, long_y, P2, t3);
  CHECK(e3.ledger.shared_structural == 50 * 8);
  CHECK(e3.ledger.comm_total() == 50 + 50);
}

TEST_CASE("one-round coding, exact diagonal type") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.0;
  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  Dist t = joint_empirical_type(x, x).to_dist();
  Tapes tp = tapes_for(4);
  ProtocolOutcome out = run_sw1(x, x, t, P, tp);
  REQUIRE(out.ok());
  CHECK(out.bob_out[0] == x);
  CHECK(out.ledger.round_count() == 1);
  CHECK(out.ledger.messages[0].dir == Direction::a_to_b);
  CHECK(out.ledger.shared_rate == 0);
}

TEST_CASE("one-round coding, degenerate singleton alphabet") {
  ProtocolParams P;
  P.n = 4;
  P.delta = 0.1;
  Seq x(1, {0, 0, 0, 0});
  Seq y = bits({0, 1, 0, 1});
  Dist t = joint_empirical_type(x, y).to_dist();
  Tapes tp = tapes_for(5);
  ProtocolOutcome out = run_sw1(x, y, t, P, tp);
  REQUIRE(out.ok());
  CHECK(out.bob_out[0] == x);
  CHECK(out.ledger.comm_total() == 0);
}

TEST_CASE("one-round coding never misdecodes across random inputs") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.1;
  Tape env(TapeCategory::env, 21);
  int successes = 0;
  for (int rep = 0; rep < 500; ++rep) {
    Seq x = random_bits(env, 8), y = random_bits(env, 8);
    Dist t = joint_empirical_type(x, y).to_dist();
    Tapes tp = tapes_for(100 + rep);
    ProtocolOutcome out = run_sw1(x, y, t, P, tp);
    if (out.ok()) {
      ++successes;
      CHECK(out.bob_out[0] == x);
      double cap = std::ceil(P.n * (conditional_entropy(t, {0}, {1}) + eta1(P, 2, 2)));
      CHECK(static_cast<double>(out.ledger.comm_total()) <= cap);
    }
  }
  CHECK(successes == 500);
}

TEST_CASE("bounded-randomness mode ledgers") {
  ProtocolParams P;
  P.n = 6;
  P.delta = 0.1;
  Seq x = bits({0, 1, 1, 0, 1, 0});
  Dist t = joint_empirical_type(x, x).to_dist();

  NewmanStrings ns;
  ns.s = 16;
  for (std::uint64_t i = 0; i < 16; ++i) ns.strings.push_back(derive_seed(7, i));

  // Shared index: the structural ledger is exactly the index width.
  Tapes tp = tapes_for(6);
  RunOpts shared{RandMode::newman, false, &ns};
  ProtocolOutcome out = run_sw1(x, x, t, P, tp, shared);
  REQUIRE(out.ok());
  CHECK(out.ledger.shared_structural == 4);

  // Transmitted seed: no shared structural randomness, the index bits ride on
  // the message and the sender's private tape pays for the sample.
  Tapes tp2 = tapes_for(7);
  RunOpts sent{RandMode::newman, true, &ns};
  ProtocolOutcome out2 = run_sw1(x, x, t, P, tp2, sent);
  REQUIRE(out2.ok());
  CHECK(out2.ledger.shared_structural == 0);
  CHECK(out2.ledger.comm_total() >= 4);
  CHECK(out2.ledger.private_a >= 4);

  // Without an explicit string set the seed width follows the sizing formula.
  Tapes tp3 = tapes_for(8);
  RunOpts implicit{RandMode::newman, true, nullptr};
  ProtocolOutcome out3 = run_sw1(x, x, t, P, tp3, implicit);
  REQUIRE(out3.ok());
  CHECK(out3.ledger.messages.front().label == "seed");
  CHECK(out3.ledger.messages.front().bits ==
        static_cast<std::uint64_t>(seed_bits_sw1(P, 2, 2)));
}

TEST_CASE("two-round coding with estimation") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.5;
  P.delta_s = 0.25;

  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  Tapes tp = tapes_for(9);
  ProtocolOutcome out = run_sw2(x, x, P, tp);
  REQUIRE(out.ok());
  CHECK(out.bob_out[0] == x);
  CHECK(out.ledger.round_count() == 2);
  // Round 1 carries Bob's sample symbols; fixed size m ceil(log2 |Y|).
  CHECK(out.ledger.round_bits(0) == 2);
  // Round 2 is Alice's samples plus the position prefix.
  CHECK(out.ledger.round_bits(1) >= 2);
  CHECK(out.estimate.has_value());
}

TEST_CASE("two-round coding first message has input-independent size") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.5;
  P.delta_s = 0.25;
  RunOpts opts{RandMode::newman, true, nullptr};
  std::uint64_t want = static_cast<std::uint64_t>(P.samples()) + seed_bits_sw2(P, 2, 2);
  for (int rep = 0; rep < 20; ++rep) {
    Tape env(TapeCategory::env, derive_seed(55, rep));
    Seq x = random_bits(env, 8), y = random_bits(env, 8);
    Tapes tp = tapes_for(800 + rep);
    ProtocolOutcome out = run_sw2(x, y, P, tp, opts);
    CHECK(out.ledger.round_bits(0) == want);
    CHECK(out.ledger.messages.front().dir == Direction::b_to_a);
  }
}

TEST_CASE("one-round coding from a channel prior") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.3;

  // Identity generation: y = x, decoding is exact.
  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  Tapes tp = tapes_for(10);
  ProtocolOutcome out = run_sw3(x, x, Channel::identity(2), P, tp);
  REQUIRE(out.ok());
  CHECK(out.bob_out[0] == x);
  // The marginal-type message plus the position prefix.
  CHECK(out.ledger.comm_total() >= 2 * 4);

  // Constant-output generation: the side information is useless but the
  // protocol still decodes (the position prefix covers the whole class).
  Seq y0 = bits({0, 0, 0, 0, 0, 0, 0, 0});
  Tapes tp2 = tapes_for(11);
  ProtocolOutcome out2 = run_sw3(x, y0, Channel::constant(2, 2, 0), P, tp2);
  REQUIRE(out2.ok());
  CHECK(out2.bob_out[0] == x);
}

TEST_CASE("channel simulation with an identity channel reproduces the input") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.2;
  P.delta_prime = 0.2;
  P.delta_double_prime = 0.2;
  Tape env(TapeCategory::env, 31);
  int successes = 0;
  for (int rep = 0; rep < 300; ++rep) {
    Seq x = random_bits(env, 8), y = random_bits(env, 8);
    Dist t = joint_empirical_type(x, y).to_dist();
    Tapes tp = tapes_for(200 + rep);
    ProtocolOutcome out = run_rst1(x, y, t, Channel::identity(2), P, tp);
    if (out.ok()) {
      ++successes;
      CHECK(out.agree());
      CHECK(out.bob_out[0] == x);
    }
  }
  CHECK(successes > 200);
}

TEST_CASE("channel simulation with a constant channel") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.1;
  P.delta_prime = 0.1;
  P.delta_double_prime = 0.1;
  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  Tapes tp = tapes_for(12);
  ProtocolOutcome out = run_rst1(x, x, joint_empirical_type(x, x).to_dist(),
                                 Channel::constant(2, 2, 1), P, tp);
  REQUIRE(out.ok());
  CHECK(out.bob_out[0] == Seq(2, std::vector<std::uint8_t>(8, 1)));
  // Single type, single candidate: only the type message is on the wire.
  CHECK(out.ledger.comm_total() == 2 * 4);
}

TEST_CASE("channel simulation ledger conformance and fiber preservation") {
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.15;
  P.delta_prime = 0.15;
  P.delta_double_prime = 0.15;
  Channel ch = Channel::bsc(0.2);
  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  Dist t = joint_empirical_type(x, x).to_dist();
  Dist md = append_channel(t.with_trivial_axis(), ch.reshape_inputs({2, 1}), {0, 2});
  double comm_cap = std::ceil(P.n * (rst_I_m_x_given_y(md) + eta2(P, 2, 2, 2, 0.15)));
  double sr_cap = std::ceil(P.n * (rst_H_m_given_xy(md) +
                                   std::log2(std::log2(std::exp(1.0))) / P.n));
  int successes = 0;
  for (int rep = 0; rep < 400; ++rep) {
    Tapes tp = tapes_for(300 + rep);
    ProtocolOutcome out = run_rst1(x, x, t, ch, P, tp);
    if (!out.ok()) continue;
    ++successes;
    CHECK(out.agree());
    CHECK(static_cast<double>(out.ledger.comm_total()) <= comm_cap);
    CHECK(static_cast<double>(out.ledger.shared_rate) <= sr_cap);
    // The chosen list entry has the same joint type with the sender's input
    // as the raw channel output.
    CHECK(joint_empirical_type(out.bob_out[0], x).counts ==
          joint_empirical_type(out.sender_raw[0], x).counts);
  }
  CHECK(successes > 20);
}

TEST_CASE("two-round channel simulation") {
  ProtocolParams P;
  P.n = 16;
  P.delta = 0.5;
  P.delta_prime = 0.3;
  P.delta_double_prime = 0.2;
  P.delta_s = 0.25;
  // Nearly constant input keeps the message type class small.
  Seq x = bits({0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0});
  Tapes tp = tapes_for(13);
  ProtocolOutcome out = run_rst2(x, x, Channel::identity(2), P, tp);
  REQUIRE(out.ok());
  CHECK(out.bob_out[0] == x);
  CHECK(out.ledger.round_count() == 2);
  CHECK(static_cast<double>(out.ledger.round_bits(1)) <= cap_rst2_round2(P, 2, 2) + 1e-9);
}

TEST_CASE("interactive simulation with identity channels") {
  InteractiveSpec spec =
      InteractiveSpec::from_presets(2, 2, {Channel::identity(2), Channel::identity(2)});
  ProtocolParams P;
  P.n = 6;
  P.delta = 1.0;
  P.delta_prime = 0.5;
  P.delta_double_prime = 0.2;
  P.m_samples = 4;
  P.delta_s = 2.0 / 3.0;
  Seq x = bits({0, 1, 1, 0, 1, 0}), y = bits({1, 1, 0, 0, 1, 0});
  int successes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Tapes tp = tapes_for(400 + rep);
    ProtocolOutcome out = run_int2(x, y, spec, P, tp);
    if (!out.ok()) continue;
    ++successes;
    REQUIRE(out.alice_out.size() == 2);
    CHECK(out.agree());
    CHECK(out.alice_out[0] == x);
    CHECK(out.alice_out[1] == y);
    CHECK(out.ledger.round_count() == 3);
  }
  CHECK(successes > 10);
}

TEST_CASE("delta-update chain on realized types") {
  InteractiveSpec spec =
      InteractiveSpec::from_presets(2, 2, {Channel::bsc(0.2), Channel::bsc(0.3)});
  ProtocolParams P;
  P.n = 6;
  P.delta = 0.8;
  P.delta_prime = 0.6;
  P.delta_double_prime = 0.3;
  P.m_samples = 4;
  P.delta_s = 2.0 / 3.0;
  Seq x = bits({0, 1, 0, 1, 0, 1}), y = bits({0, 0, 1, 1, 0, 1});
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    Tapes tp = tapes_for(500 + rep);
    ProtocolOutcome out = run_int2(x, y, spec, P, tp);
    if (!out.ok()) continue;
    // Realized per-round channel deviations.
    bool chain_clean = l1_type_dist(joint_empirical_type(x, y), *out.estimate) <= P.delta + 1e-12;
    Dist center = out.estimate->with_trivial_axis();  // placeholder, rebuilt below
    for (int i = 0; i < 2 && chain_clean; ++i) {
      std::vector<const Seq*> prev = {&x, &y};
      for (int k = 0; k < i; ++k) prev.push_back(&out.alice_out[static_cast<std::size_t>(k)]);
      std::vector<const Seq*> cur = prev;
      cur.push_back(&out.alice_out[static_cast<std::size_t>(i)]);
      Dist base = joint_empirical_type(prev).to_dist();
      std::vector<int> in = {spec.alice_sends(i) ? 0 : 1};
      for (int k = 0; k < i; ++k) in.push_back(2 + k);
      Dist stepped = append_channel(base, spec.channels[static_cast<std::size_t>(i)], in);
      double dev = l1_type_dist(joint_empirical_type(cur), stepped);
      if (dev > P.delta_prime + 1e-12) chain_clean = false;
      if (chain_clean) {
        // Triangle chain: the realized joint must satisfy the next round's
        // typicality precondition against the estimated center.
        Dist c = *out.estimate;
        for (int k = 0; k <= i; ++k) {
          std::vector<int> ci = {spec.alice_sends(k) ? 0 : 1};
          for (int q = 0; q < k; ++q) ci.push_back(2 + q);
          c = append_channel(c, spec.channels[static_cast<std::size_t>(k)], ci);
        }
        double pre = l1_type_dist(joint_empirical_type(cur), c);
        CHECK(pre <= P.delta + (i + 1) * P.delta_prime + 1e-9);
        ++checked;
      }
    }
    (void)center;
  }
  CHECK(checked > 20);
}

TEST_CASE("round-preserving interactive simulation") {
  InteractiveSpec spec =
      InteractiveSpec::from_presets(2, 2, {Channel::identity(2), Channel::identity(2)});
  ProtocolParams P;
  P.n = 6;
  P.delta = 1.0;
  P.delta_prime = 0.5;
  P.delta_double_prime = 0.2;
  P.m_samples = 4;
  P.delta_s = 2.0 / 3.0;
  Seq x = bits({0, 1, 1, 0, 1, 0}), y = bits({1, 1, 0, 0, 1, 0});
  int successes = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Tapes tp = tapes_for(600 + rep);
    ProtocolOutcome out = run_int3(x, y, spec, P, tp);
    if (!out.ok()) continue;
    ++successes;
    CHECK(out.agree());
    CHECK(out.alice_out[0] == x);
    CHECK(out.alice_out[1] == y);
    CHECK(out.ledger.round_count() == 2);
    CHECK(out.ledger.messages.front().dir == Direction::a_to_b);
  }
  CHECK(successes > 10);
}

TEST_CASE("round-preserving variant with one round stays on one round") {
  InteractiveSpec spec = InteractiveSpec::from_presets(2, 2, {Channel::identity(2)});
  ProtocolParams P;
  P.n = 6;
  P.delta = 1.0;
  P.delta_prime = 0.5;
  P.delta_double_prime = 0.2;
  P.m_samples = 3;
  P.delta_s = 0.5;
  Seq x = bits({0, 1, 1, 0, 1, 0}), y = bits({1, 1, 0, 0, 1, 0});
  int successes = 0;
  for (int rep = 0; rep < 30; ++rep) {
    Tapes tp = tapes_for(900 + rep);
    ProtocolOutcome out = run_int3(x, y, spec, P, tp);
    if (!out.ok()) continue;
    ++successes;
    // No side information is used: everything travels in one direction.
    CHECK(out.ledger.round_count() == 1);
    CHECK(out.alice_out[0] == x);
  }
  CHECK(successes > 5);
}

TEST_CASE("single-round interactive reduces to the two-round shape") {
  InteractiveSpec spec = InteractiveSpec::from_presets(2, 2, {Channel::bsc(0.2)});
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.6;
  P.delta_prime = 0.4;
  P.delta_double_prime = 0.2;
  P.delta_s = 0.25;
  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  for (int rep = 0; rep < 50; ++rep) {
    Tapes tp = tapes_for(700 + rep);
    ProtocolOutcome out = run_int2(x, x, spec, P, tp);
    if (!out.ok()) continue;
    CHECK(out.ledger.round_count() == 2);
    CHECK(out.alice_out.size() == 1);
  }
}

TEST_CASE("mismatched shared tapes are detected") {
  ProtocolParams P;
  P.n = 6;
  P.delta = 0.1;
  Seq x = bits({0, 1, 1, 0, 1, 0});
  Dist t = joint_empirical_type(x, x).to_dist();
  Tapes tp{Tape(TapeCategory::shared_structural, 1),
           Tape(TapeCategory::shared_structural, 2),  // desynchronized on purpose
           Tape(TapeCategory::shared_rate, 3),
           Tape(TapeCategory::shared_rate, 3),
           Tape(TapeCategory::private_a, 4),
           Tape(TapeCategory::private_b, 5)};
  CHECK_THROWS(run_sw1(x, x, t, P, tp));
}

TEST_CASE("abort outcomes carry partial ledgers") {
  // Force a sender-typicality abort with a center far from anything the
  // channel can produce.
  ProtocolParams P;
  P.n = 8;
  P.delta = 0.0;
  P.delta_prime = 0.0;
  P.delta_double_prime = 0.1;
  Seq x = bits({0, 1, 1, 0, 1, 0, 0, 1});
  Dist far({2, 2}, {0.0, 0.5, 0.5, 0.0});
  Tapes tp = tapes_for(14);
  ProtocolOutcome out = run_rst1(x, x, far, Channel::bsc(0.5), P, tp);
  CHECK_FALSE(out.ok());
  CHECK(out.event == ErrorEvent::e1);
  CHECK(out.abort_round == 1);
  CHECK(out.ledger.comm_total() == 0);
  CHECK(out.ledger.private_a > 0);  // the channel sample was paid for
}
