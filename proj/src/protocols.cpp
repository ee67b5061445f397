#include "typesim/protocols.hpp"

#include <cmath>

#include "typesim/codebook.hpp"
#include "typesim/info_math.hpp"
#include "typesim/types.hpp"

namespace typesim {

namespace {

constexpr std::uint64_t kStructuralDomain = 0x7453696d53747275ull;

int ceil_bits(double v) {
  check_arg(v >= 0.0, "bit count must be non-negative");
  return static_cast<int>(std::ceil(v - 1e-12));
}

std::uint64_t fold_bits(const std::vector<std::uint8_t>& bits) {
  std::uint64_t acc = 0xcbf29ce484222325ull;
  std::uint64_t word = 0;
  int in_word = 0;
  for (std::uint8_t b : bits) {
    word = (word << 1) | b;
    if (++in_word == 64) {
      acc = mix64(acc ^ word);
      word = 0;
      in_word = 0;
    }
  }
  if (in_word > 0) acc = mix64(acc ^ (word | (1ull << in_word)));
  return acc;
}

struct Session {
  const ProtocolParams& P;
  RunOpts opts;
  Tapes& t;
  ProtocolOutcome out;
  // Shared-structural accounting: in newman mode only the string index is
  // shared randomness; the expanded stream is derived from it.
  std::optional<std::uint64_t> structural_override;

  Session(const ProtocolParams& params, const RunOpts& o, Tapes& tapes)
      : P(params), opts(o), t(tapes) {
    P.validate();
  }

  void send(Direction dir, std::uint64_t bits, const char* label) {
    out.ledger.add_message(dir, bits, label);
  }

  // Replaces both structural streams with one derived from a short seed. The
  // seed is either an index into a pre-verified string set or a fresh
  // bit string of the derandomization size; it is transmitted by `seed_owner`
  // when opts.transmit_seed is set, otherwise drawn from the shared tape.
  void setup_structural(Direction seed_dir, int seed_bits_formula) {
    if (opts.mode == RandMode::unbounded) return;
    const NewmanStrings* ns = opts.strings;
    int bits = ns ? ceil_log2(ns->s) : seed_bits_formula;
    std::uint64_t seed = 0;
    if (opts.transmit_seed) {
      Tape& priv = seed_dir == Direction::a_to_b ? t.a_private : t.b_private;
      if (ns) {
        std::uint64_t idx = priv.draw_uniform(ns->s);
        seed = ns->strings[idx];
      } else {
        seed = derive_seed(kStructuralDomain, fold_bits(priv.draw_bit_vec(bits)));
      }
      send(seed_dir, static_cast<std::uint64_t>(bits), "seed");
      structural_override = 0;
    } else {
      if (ns) {
        std::uint64_t ia = t.a_structural.draw_uniform(ns->s);
        std::uint64_t ib = t.b_structural.draw_uniform(ns->s);
        check_state(ia == ib, "shared structural streams desynchronized");
        seed = ns->strings[ia];
      } else {
        std::uint64_t va = fold_bits(t.a_structural.draw_bit_vec(bits));
        std::uint64_t vb = fold_bits(t.b_structural.draw_bit_vec(bits));
        check_state(va == vb, "shared structural streams desynchronized");
        seed = derive_seed(kStructuralDomain, va);
      }
      // Ledger convention: the shared randomness is the index width.
      structural_override = static_cast<std::uint64_t>(bits);
    }
    t.a_structural.reseed(seed);
    t.b_structural.reseed(seed);
  }

  // Both parties draw the same value from their copies of a shared tape.
  std::uint64_t shared_uniform(Tape& a, Tape& b, std::uint64_t bound) {
    std::uint64_t va = a.draw_uniform(bound);
    std::uint64_t vb = b.draw_uniform(bound);
    check_state(va == vb, "shared tapes desynchronized");
    return va;
  }

  std::vector<std::uint8_t> shared_rate_bits(int k) {
    auto va = t.a_rate.draw_bit_vec(k);
    auto vb = t.b_rate.draw_bit_vec(k);
    check_state(va == vb, "shared rate tapes desynchronized");
    return va;
  }

  OrderedCodebook shared_shuffle(const std::vector<std::uint32_t>& universe) {
    OrderedCodebook ca = random_codebook(universe, t.a_structural);
    OrderedCodebook cb = random_codebook(universe, t.b_structural);
    check_state(ca.entries == cb.entries, "shared structural streams desynchronized");
    return ca;
  }

  ProtocolOutcome finish(Status status, ErrorEvent event, int abort_round) {
    out.status = status;
    out.event = event;
    out.abort_round = abort_round;
    check_state(t.a_structural.bits_drawn() == t.b_structural.bits_drawn(),
                "structural consumption mismatch");
    check_state(t.a_rate.bits_drawn() == t.b_rate.bits_drawn(), "rate consumption mismatch");
    out.ledger.shared_structural =
        structural_override ? *structural_override : t.a_structural.bits_drawn();
    out.ledger.shared_rate = t.a_rate.bits_drawn();
    out.ledger.private_a = t.a_private.bits_drawn();
    out.ledger.private_b = t.b_private.bits_drawn();
    return std::move(out);
  }
};

std::vector<std::uint32_t> full_universe(int arity, std::size_t n) {
  double space = std::pow(static_cast<double>(arity), static_cast<double>(n));
  check_arg(space <= static_cast<double>(kEnumCap), "sequence universe exceeds cap");
  std::size_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) cells *= static_cast<std::size_t>(arity);
  std::vector<std::uint32_t> u(cells);
  for (std::size_t i = 0; i < cells; ++i) u[i] = static_cast<std::uint32_t>(i);
  return u;
}

Seq trivial_seq(std::size_t n) { return Seq(1, std::vector<std::uint8_t>(n, 0)); }

// Sampling exchange shared by the two-round protocols. Coordinates come from
// the (possibly derandomized) structural streams.
struct ExchangeResult {
  Dist t_tilde;
  int m = 0;
};

ExchangeResult estimation_exchange(Session& s, const Seq& x, const Seq& y, Direction first) {
  int m = s.P.samples();
  check_arg(m >= 1, "estimation needs at least one sample");
  std::size_t n = x.n();
  std::vector<std::size_t> coords(static_cast<std::size_t>(m));
  for (auto& c : coords)
    c = static_cast<std::size_t>(s.shared_uniform(s.t.a_structural, s.t.b_structural, n));
  int bits_x = ceil_log2(static_cast<std::uint64_t>(x.arity));
  int bits_y = ceil_log2(static_cast<std::uint64_t>(y.arity));
  if (first == Direction::b_to_a) {
    s.send(Direction::b_to_a, static_cast<std::uint64_t>(m) * bits_y, "samples_b");
    s.send(Direction::a_to_b, static_cast<std::uint64_t>(m) * bits_x, "samples_a");
  } else {
    s.send(Direction::a_to_b, static_cast<std::uint64_t>(m) * bits_x, "samples_a");
    s.send(Direction::b_to_a, static_cast<std::uint64_t>(m) * bits_y, "samples_b");
  }
  std::vector<double> cnt(static_cast<std::size_t>(x.arity) * y.arity, 0.0);
  for (std::size_t c : coords)
    cnt[static_cast<std::size_t>(x.sym[c]) * y.arity + y.sym[c]] += 1.0 / m;
  ExchangeResult r;
  r.t_tilde = Dist({x.arity, y.arity}, std::move(cnt));
  r.m = m;
  return r;
}

// One compression round: the sender applies the channel locally, filters the
// message's type class through shared ordering and rate bits, and identifies
// its choice by a position prefix. Returns the simulated message on success.
struct RstRoundSetup {
  const Seq* s_base;
  const Seq* r_base;
  const Seq* h;
  const Channel* ch;  // p(m | s, h)
  Dist center_srh;    // axes [S, R, H]
  double delta_round = 0.0;
  Direction dir = Direction::a_to_b;
};

struct RstRoundResult {
  bool ok = false;
  ErrorEvent event = ErrorEvent::none;
  Seq m_sender;    // sender's copy (chosen list entry)
  Seq m_receiver;  // receiver's decoded copy
  Seq m_raw;       // uncompressed channel output
};

RstRoundResult rst_round(Session& s, const RstRoundSetup& r) {
  RstRoundResult res;
  const ProtocolParams& P = s.P;
  std::size_t n = r.s_base->n();
  int m_ar = r.ch->output_arity;
  int h_ar = r.h->arity;
  int s_eff = r.s_base->arity * h_ar;
  int r_eff = r.r_base->arity * h_ar;
  Tape& sender_priv = r.dir == Direction::a_to_b ? s.t.a_private : s.t.b_private;

  // Local channel application on (s, h).
  Seq m;
  m.arity = m_ar;
  m.sym.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row = static_cast<std::size_t>(r.s_base->sym[i]) * h_ar + r.h->sym[i];
    m.sym[i] = static_cast<std::uint8_t>(r.ch->sample_flat(row, sender_priv));
  }
  res.m_raw = m;

  RoundTypicalSpec spec{r.center_srh, r.delta_round, r.ch, P.delta_prime};
  if (!round_member_sender(m, *r.s_base, *r.h, spec, r.r_base->arity)) {
    res.event = ErrorEvent::e1;
    return res;
  }

  // Type of the message, fixed-width counts.
  JointType t_m = empirical_type(m);
  s.send(r.dir, static_cast<std::uint64_t>(m_ar) * ceil_log2(static_cast<std::uint64_t>(n) + 1),
         "message_type");

  // Shared ordering of the type class, then rate-based thinning.
  OrderedCodebook book = s.shared_shuffle(enumerate_type_class(t_m));
  Channel ch_sh = r.ch->reshape_inputs({r.s_base->arity, h_ar});
  Dist md = append_channel(r.center_srh, ch_sh, {0, 2});
  double R = rst_rate_R(P, md, m_ar, s_eff);
  int rate_bits = std::max(0, static_cast<int>(std::floor(static_cast<double>(P.n) * R)));
  rate_bits = std::min(rate_bits, book.index_width);
  OrderedCodebook l_r = prefix_filter(book, s.shared_rate_bits(rate_bits));

  // Sender picks uniformly among entries with the exact realized joint type.
  JointType t_msh = joint_empirical_type({&m, r.s_base, r.h});
  std::vector<std::size_t> fiber;
  for (std::size_t i = 0; i < l_r.size(); ++i) {
    Seq cand = seq_from_code(l_r.entries[i], m_ar, n);
    if (joint_empirical_type({&cand, r.s_base, r.h}).counts == t_msh.counts) fiber.push_back(i);
  }
  if (fiber.empty()) {
    res.event = ErrorEvent::e2;
    return res;
  }
  std::size_t pick = fiber[sender_priv.draw_uniform(fiber.size())];
  Seq m_r = seq_from_code(l_r.entries[pick], m_ar, n);

  double C = rst_rate_C(P, md, m_ar, s_eff, r_eff, r.delta_round);
  int prefix_len = std::min(ceil_bits(static_cast<double>(P.n) * C), l_r.index_width);
  auto prefix = l_r.position_prefix(pick, prefix_len);
  s.send(r.dir, static_cast<std::uint64_t>(prefix_len), "position_prefix");

  // The chosen message must itself be receiver-typical; otherwise the decode
  // target is wrong no matter what the receiver sees.
  if (!round_member_receiver(m_r, *r.r_base, *r.h, spec, r.s_base->arity)) {
    res.event = ErrorEvent::e3;
    return res;
  }

  OrderedCodebook l_rc = prefix_filter(l_r, prefix);
  std::vector<Seq> decoded;
  for (std::size_t i = 0; i < l_rc.size(); ++i) {
    Seq cand = seq_from_code(l_rc.entries[i], m_ar, n);
    if (round_member_receiver(cand, *r.r_base, *r.h, spec, r.s_base->arity)) {
      decoded.push_back(std::move(cand));
      if (decoded.size() > 1) break;
    }
  }
  if (decoded.size() != 1) {
    res.event = ErrorEvent::e4;
    return res;
  }
  res.ok = true;
  res.m_sender = std::move(m_r);
  res.m_receiver = std::move(decoded[0]);
  return res;
}

Dist center_with_history(const Dist& t_xy, const InteractiveSpec& spec, int upto_round,
                         bool alice_sender) {
  // Joint on (X, Y, M_1..M_upto) -> axes [S, R, H].
  Dist q = t_xy;
  for (int k = 0; k < upto_round; ++k) {
    std::vector<int> in = {spec.alice_sends(k) ? 0 : 1};
    for (int j = 0; j < k; ++j) in.push_back(2 + j);
    q = append_channel(q, spec.channels[static_cast<std::size_t>(k)], in);
  }
  std::vector<int> order;
  order.push_back(alice_sender ? 0 : 1);
  order.push_back(alice_sender ? 1 : 0);
  for (int k = 0; k < upto_round; ++k) order.push_back(2 + k);
  q = q.permute(order);
  if (upto_round == 0) return q.with_trivial_axis();
  return q.flatten_tail(upto_round);
}

}  // namespace

const char* error_name(ErrorEvent e) {
  switch (e) {
    case ErrorEvent::none: return "none";
    case ErrorEvent::est: return "est";
    case ErrorEvent::e1: return "e1";
    case ErrorEvent::e2: return "e2";
    case ErrorEvent::e3: return "e3";
    case ErrorEvent::e4: return "e4";
  }
  return "?";
}

Tapes Tapes::from_seed(std::uint64_t master, std::uint64_t trial) {
  std::uint64_t structural = derive_seed(master, trial, 1);
  std::uint64_t rate = derive_seed(master, trial, 2);
  return Tapes{Tape(TapeCategory::shared_structural, structural),
               Tape(TapeCategory::shared_structural, structural),
               Tape(TapeCategory::shared_rate, rate),
               Tape(TapeCategory::shared_rate, rate),
               Tape(TapeCategory::private_a, derive_seed(master, trial, 3)),
               Tape(TapeCategory::private_b, derive_seed(master, trial, 4))};
}

bool ProtocolOutcome::agree() const {
  if (alice_out.size() != bob_out.size()) return false;
  for (std::size_t i = 0; i < alice_out.size(); ++i)
    if (!(alice_out[i] == bob_out[i])) return false;
  return true;
}

EstimateOutcome estimate_joint_type(const Seq& x, const Seq& y, const ProtocolParams& params,
                                    Tapes& tapes, const RunOpts& opts, Direction first) {
  check_arg(x.n() == y.n(), "input length mismatch");
  Session s(params, opts, tapes);
  s.setup_structural(first, seed_bits_sw2(params, x.arity, y.arity));
  ExchangeResult r = estimation_exchange(s, x, y, first);
  ProtocolOutcome out = s.finish(Status::success, ErrorEvent::none, 0);
  return EstimateOutcome{std::move(r.t_tilde), r.m, std::move(out.ledger)};
}

ProtocolOutcome run_sw1(const Seq& x, const Seq& y, const Dist& t_tilde,
                        const ProtocolParams& params, Tapes& tapes, const RunOpts& opts) {
  check_arg(x.n() == y.n() && x.n() == static_cast<std::size_t>(params.n), "length mismatch");
  check_arg(t_tilde.coords() == 2 && t_tilde.arities[0] == x.arity &&
                t_tilde.arities[1] == y.arity,
            "center shape mismatch");
  Session s(params, opts, tapes);
  s.setup_structural(Direction::a_to_b, seed_bits_sw1(params, x.arity, y.arity));

  OrderedCodebook book = s.shared_shuffle(full_universe(x.arity, x.n()));
  double C = sw_rate_C(params, t_tilde, x.arity, y.arity);
  int prefix_len = std::min(ceil_bits(params.n * C), book.index_width);
  std::size_t pos = *book.position_of(static_cast<std::uint32_t>(seq_code(x)));
  auto prefix = book.position_prefix(pos, prefix_len);
  s.send(Direction::a_to_b, static_cast<std::uint64_t>(prefix_len), "position_prefix");

  OrderedCodebook l_c = prefix_filter(book, prefix);
  TypicalSpec tspec{t_tilde, params.delta};
  std::vector<Seq> found;
  for (std::size_t i = 0; i < l_c.size(); ++i) {
    Seq cand = seq_from_code(l_c.entries[i], x.arity, x.n());
    if (typical_member(cand, y, tspec)) {
      found.push_back(std::move(cand));
      if (found.size() > 1) break;
    }
  }
  s.out.alice_out = {x};
  if (found.size() != 1) return s.finish(Status::abort, ErrorEvent::e4, 1);
  s.out.bob_out = {std::move(found[0])};
  return s.finish(Status::success, ErrorEvent::none, 0);
}

ProtocolOutcome run_sw2(const Seq& x, const Seq& y, const ProtocolParams& params, Tapes& tapes,
                        const RunOpts& opts) {
  Session s(params, opts, tapes);
  s.setup_structural(Direction::b_to_a, seed_bits_sw2(params, x.arity, y.arity));
  ExchangeResult est = estimation_exchange(s, x, y, Direction::b_to_a);
  s.out.estimate = est.t_tilde;
  s.out.estimate_within_delta =
      l1_type_dist(joint_empirical_type(x, y), est.t_tilde) <= params.delta + 1e-12;

  OrderedCodebook book = s.shared_shuffle(full_universe(x.arity, x.n()));
  double C = sw_rate_C(params, est.t_tilde, x.arity, y.arity);
  int prefix_len = std::min(ceil_bits(params.n * C), book.index_width);
  std::size_t pos = *book.position_of(static_cast<std::uint32_t>(seq_code(x)));
  auto prefix = book.position_prefix(pos, prefix_len);
  s.send(Direction::a_to_b, static_cast<std::uint64_t>(prefix_len), "position_prefix");

  OrderedCodebook l_c = prefix_filter(book, prefix);
  TypicalSpec tspec{est.t_tilde, params.delta};
  std::vector<Seq> found;
  for (std::size_t i = 0; i < l_c.size(); ++i) {
    Seq cand = seq_from_code(l_c.entries[i], x.arity, x.n());
    if (typical_member(cand, y, tspec)) {
      found.push_back(std::move(cand));
      if (found.size() > 1) break;
    }
  }
  s.out.alice_out = {x};
  if (found.size() != 1) return s.finish(Status::abort, ErrorEvent::e4, 1);
  s.out.bob_out = {std::move(found[0])};
  return s.finish(Status::success, ErrorEvent::none, 0);
}

ProtocolOutcome run_sw3(const Seq& x, const Seq& y, const Channel& p_y_given_x,
                        const ProtocolParams& params, Tapes& tapes, const RunOpts& opts) {
  check_arg(p_y_given_x.input_arities == std::vector<int>{x.arity} &&
                p_y_given_x.output_arity == y.arity,
            "channel shape mismatch");
  Session s(params, opts, tapes);
  s.setup_structural(Direction::a_to_b, seed_bits_sw3(params, x.arity, y.arity));

  JointType t_x = empirical_type(x);
  s.send(Direction::a_to_b,
         static_cast<std::uint64_t>(x.arity) * ceil_log2(static_cast<std::uint64_t>(params.n) + 1),
         "marginal_type");

  // Center t_x * p on (X, Y); decode requires the exact marginal type plus
  // closeness of the joint to the center.
  Dist center = append_channel(t_x.to_dist(), p_y_given_x, {0});
  OrderedCodebook book = s.shared_shuffle(full_universe(x.arity, x.n()));
  double C = sw_rate_C(params, center, x.arity, y.arity);
  int prefix_len = std::min(ceil_bits(params.n * C), book.index_width);
  std::size_t pos = *book.position_of(static_cast<std::uint32_t>(seq_code(x)));
  auto prefix = book.position_prefix(pos, prefix_len);
  s.send(Direction::a_to_b, static_cast<std::uint64_t>(prefix_len), "position_prefix");

  OrderedCodebook l_c = prefix_filter(book, prefix);
  TypicalSpec tspec{center, params.delta};
  std::vector<Seq> found;
  for (std::size_t i = 0; i < l_c.size(); ++i) {
    Seq cand = seq_from_code(l_c.entries[i], x.arity, x.n());
    if (empirical_type(cand).counts != t_x.counts) continue;
    if (typical_member(cand, y, tspec)) {
      found.push_back(std::move(cand));
      if (found.size() > 1) break;
    }
  }
  s.out.alice_out = {x};
  if (found.empty()) return s.finish(Status::abort, ErrorEvent::e1, 1);
  if (found.size() > 1) return s.finish(Status::abort, ErrorEvent::e4, 1);
  s.out.bob_out = {std::move(found[0])};
  return s.finish(Status::success, ErrorEvent::none, 0);
}

ProtocolOutcome run_rst1(const Seq& x, const Seq& y, const Dist& t_tilde, const Channel& ch,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts) {
  check_arg(x.n() == y.n() && x.n() == static_cast<std::size_t>(params.n), "length mismatch");
  Session s(params, opts, tapes);
  s.setup_structural(Direction::a_to_b, seed_bits_rst(params, ch.output_arity, x.arity, y.arity));

  Seq h = trivial_seq(x.n());
  RstRoundSetup r{&x, &y, &h, &ch, t_tilde.with_trivial_axis(), params.delta, Direction::a_to_b};
  RstRoundResult rr = rst_round(s, r);
  s.out.sender_raw = {rr.m_raw};
  if (!rr.ok) return s.finish(Status::abort, rr.event, 1);
  s.out.alice_out = {std::move(rr.m_sender)};
  s.out.bob_out = {std::move(rr.m_receiver)};
  return s.finish(Status::success, ErrorEvent::none, 0);
}

ProtocolOutcome run_rst2(const Seq& x, const Seq& y, const Channel& ch,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts) {
  Session s(params, opts, tapes);
  s.setup_structural(Direction::b_to_a, seed_bits_rst(params, ch.output_arity, x.arity, y.arity));
  ExchangeResult est = estimation_exchange(s, x, y, Direction::b_to_a);
  s.out.estimate = est.t_tilde;
  s.out.estimate_within_delta =
      l1_type_dist(joint_empirical_type(x, y), est.t_tilde) <= params.delta + 1e-12;

  Seq h = trivial_seq(x.n());
  RstRoundSetup r{&x,       &y, &h, &ch, est.t_tilde.with_trivial_axis(), params.delta,
                  Direction::a_to_b};
  RstRoundResult rr = rst_round(s, r);
  s.out.sender_raw = {rr.m_raw};
  if (!rr.ok) return s.finish(Status::abort, rr.event, 1);
  s.out.alice_out = {std::move(rr.m_sender)};
  s.out.bob_out = {std::move(rr.m_receiver)};
  return s.finish(Status::success, ErrorEvent::none, 0);
}

ProtocolOutcome run_int2(const Seq& x, const Seq& y, const InteractiveSpec& spec,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts) {
  spec.validate();
  check_arg(x.arity == spec.x_arity && y.arity == spec.y_arity, "input arity mismatch");
  Session s(params, opts, tapes);
  int m_max = 0;
  for (int i = 0; i < spec.rounds(); ++i) m_max = std::max(m_max, spec.message_arity(i));
  s.setup_structural(Direction::b_to_a, seed_bits_rst(params, m_max, x.arity, y.arity));
  ExchangeResult est = estimation_exchange(s, x, y, Direction::b_to_a);
  s.out.estimate = est.t_tilde;
  s.out.estimate_within_delta =
      l1_type_dist(joint_empirical_type(x, y), est.t_tilde) <= params.delta + 1e-12;

  std::vector<Seq> alice_hist, bob_hist;
  for (int i = 0; i < spec.rounds(); ++i) {
    bool alice_sender = spec.alice_sends(i);
    std::vector<const Seq*> ah, bh;
    for (const Seq& q : alice_hist) ah.push_back(&q);
    for (const Seq& q : bob_hist) bh.push_back(&q);
    Seq h_alice = i == 0 ? trivial_seq(x.n()) : flatten_seqs(ah);
    Seq h_bob = i == 0 ? trivial_seq(x.n()) : flatten_seqs(bh);
    check_state(h_alice == h_bob, "transcript views diverged");

    RstRoundSetup r;
    r.s_base = alice_sender ? &x : &y;
    r.r_base = alice_sender ? &y : &x;
    r.h = &h_alice;
    r.ch = &spec.channels[static_cast<std::size_t>(i)];
    r.center_srh = center_with_history(est.t_tilde, spec, i, alice_sender);
    r.delta_round = params.delta + i * params.delta_prime;
    r.dir = alice_sender ? Direction::a_to_b : Direction::b_to_a;
    RstRoundResult rr = rst_round(s, r);
    s.out.sender_raw.push_back(rr.m_raw);
    if (!rr.ok) {
      s.out.alice_out = alice_hist;
      s.out.bob_out = bob_hist;
      return s.finish(Status::abort, rr.event, i + 1);
    }
    alice_hist.push_back(alice_sender ? rr.m_sender : rr.m_receiver);
    bob_hist.push_back(alice_sender ? rr.m_receiver : rr.m_sender);
  }
  s.out.alice_out = alice_hist;
  s.out.bob_out = bob_hist;
  return s.finish(Status::success, ErrorEvent::none, 0);
}

ProtocolOutcome run_int3(const Seq& x, const Seq& y, const InteractiveSpec& spec,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts) {
  spec.validate();
  check_arg(x.arity == spec.x_arity && y.arity == spec.y_arity, "input arity mismatch");
  Session s(params, opts, tapes);
  int m_max = 0;
  for (int i = 0; i < spec.rounds(); ++i) m_max = std::max(m_max, spec.message_arity(i));
  // The first message carries the derandomization seed: Alice samples it
  // privately and transmits it.
  RunOpts local = opts;
  if (opts.mode == RandMode::newman) local.transmit_seed = true;
  s.opts = local;
  s.setup_structural(Direction::a_to_b, seed_bits_rst(params, m_max, x.arity, y.arity));

  // Sampling coordinates are fixed by the structural stream; the symbol
  // exchange is folded into the first two rounds. A single-round spec has no
  // estimated rounds, so the exchange is skipped entirely.
  bool needs_estimate = spec.rounds() > 1;
  int m = params.samples();
  std::vector<std::size_t> coords(static_cast<std::size_t>(needs_estimate ? m : 0));
  for (auto& c : coords)
    c = static_cast<std::size_t>(s.shared_uniform(s.t.a_structural, s.t.b_structural, x.n()));

  // Round 1: Alice's exact marginal type, the first simulated message against
  // a product center with no side information, then her sample symbols.
  JointType t_x = empirical_type(x);
  s.send(Direction::a_to_b,
         static_cast<std::uint64_t>(x.arity) * ceil_log2(static_cast<std::uint64_t>(params.n) + 1),
         "marginal_type");
  Seq h0 = trivial_seq(x.n());
  Seq y_trivial = trivial_seq(x.n());
  RstRoundSetup r1;
  r1.s_base = &x;
  r1.r_base = &y_trivial;
  r1.h = &h0;
  r1.ch = &spec.channels[0];
  r1.center_srh = t_x.to_dist().with_trivial_axis().with_trivial_axis();
  r1.delta_round = 0.0;
  r1.dir = Direction::a_to_b;
  RstRoundResult rr1 = rst_round(s, r1);
  s.out.sender_raw.push_back(rr1.m_raw);
  if (!rr1.ok) return s.finish(Status::abort, rr1.event, 1);
  if (needs_estimate)
    s.send(Direction::a_to_b,
           static_cast<std::uint64_t>(m) * ceil_log2(static_cast<std::uint64_t>(x.arity)),
           "samples_a");

  std::vector<Seq> alice_hist{rr1.m_sender}, bob_hist{rr1.m_receiver};
  if (!needs_estimate) {
    s.out.alice_out = alice_hist;
    s.out.bob_out = bob_hist;
    return s.finish(Status::success, ErrorEvent::none, 0);
  }

  // Round 2 onward: Bob returns his samples, both form the estimate, and the
  // remaining messages run against the estimated center.
  s.send(Direction::b_to_a,
         static_cast<std::uint64_t>(m) * ceil_log2(static_cast<std::uint64_t>(y.arity)),
         "samples_b");
  std::vector<double> cnt(static_cast<std::size_t>(x.arity) * y.arity, 0.0);
  for (std::size_t c : coords)
    cnt[static_cast<std::size_t>(x.sym[c]) * y.arity + y.sym[c]] += 1.0 / m;
  Dist t_tilde({x.arity, y.arity}, std::move(cnt));
  s.out.estimate = t_tilde;
  s.out.estimate_within_delta =
      l1_type_dist(joint_empirical_type(x, y), t_tilde) <= params.delta + 1e-12;

  for (int i = 1; i < spec.rounds(); ++i) {
    bool alice_sender = spec.alice_sends(i);
    std::vector<const Seq*> ah, bh;
    for (const Seq& q : alice_hist) ah.push_back(&q);
    for (const Seq& q : bob_hist) bh.push_back(&q);
    Seq h_alice = flatten_seqs(ah);
    Seq h_bob = flatten_seqs(bh);
    check_state(h_alice == h_bob, "transcript views diverged");

    RstRoundSetup r;
    r.s_base = alice_sender ? &x : &y;
    r.r_base = alice_sender ? &y : &x;
    r.h = &h_alice;
    r.ch = &spec.channels[static_cast<std::size_t>(i)];
    r.center_srh = center_with_history(t_tilde, spec, i, alice_sender);
    r.delta_round = params.delta + i * params.delta_prime;
    r.dir = alice_sender ? Direction::a_to_b : Direction::b_to_a;
    RstRoundResult rr = rst_round(s, r);
    s.out.sender_raw.push_back(rr.m_raw);
    if (!rr.ok) {
      s.out.alice_out = alice_hist;
      s.out.bob_out = bob_hist;
      return s.finish(Status::abort, rr.event, i + 1);
    }
    alice_hist.push_back(alice_sender ? rr.m_sender : rr.m_receiver);
    bob_hist.push_back(alice_sender ? rr.m_receiver : rr.m_sender);
  }
  s.out.alice_out = alice_hist;
  s.out.bob_out = bob_hist;
  return s.finish(Status::success, ErrorEvent::none, 0);
}

}  // namespace typesim
