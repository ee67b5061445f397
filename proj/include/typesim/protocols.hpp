#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "typesim/channel.hpp"
#include "typesim/dist.hpp"
#include "typesim/interactive.hpp"
#include "typesim/newman.hpp"
#include "typesim/rates.hpp"
#include "typesim/seq.hpp"
#include "typesim/tape.hpp"

namespace typesim {

enum class ErrorEvent { none, est, e1, e2, e3, e4 };
enum class Status { success, abort };

const char* error_name(ErrorEvent e);

enum class RandMode { unbounded, newman };

struct RunOpts {
  RandMode mode = RandMode::unbounded;
  // In newman mode: the seed-picking party samples privately and transmits
  // the index instead of reading it from the shared structural tape.
  bool transmit_seed = false;
  const NewmanStrings* strings = nullptr;  // optional pre-verified seed set
};

// Each party holds its own copy of the shared tapes (identical seeds) plus a
// private tape. Both copies must consume identical draw sequences; the
// orchestrator checks this, so any desync between the parties' views of the
// shared randomness is caught immediately.
struct Tapes {
  Tape a_structural, b_structural;
  Tape a_rate, b_rate;
  Tape a_private, b_private;

  static Tapes from_seed(std::uint64_t master, std::uint64_t trial);
};

struct ProtocolOutcome {
  Status status = Status::success;
  ErrorEvent event = ErrorEvent::none;
  int abort_round = 0;  // 1-based simulated-message index, 0 when none
  std::vector<Seq> alice_out;
  std::vector<Seq> bob_out;
  std::vector<Seq> sender_raw;  // per simulated message, the uncompressed channel output
  CostLedger ledger;
  // Set when an estimation stage ran: the estimate and whether it landed
  // within delta of the true joint type (harness-side check).
  std::optional<Dist> estimate;
  bool estimate_within_delta = true;

  bool ok() const { return status == Status::success; }
  bool agree() const;
};

struct EstimateOutcome {
  Dist t_tilde;
  int m_samples = 0;
  CostLedger ledger;
};

// Two-round sampling exchange: shared randomness picks m coordinates with
// replacement, the parties exchange the symbols found there, and both form
// the empirical distribution of the exchanged pairs.
EstimateOutcome estimate_joint_type(const Seq& x, const Seq& y, const ProtocolParams& params,
                                    Tapes& tapes, const RunOpts& opts = {},
                                    Direction first = Direction::b_to_a);

// One-round transmission of x to a receiver holding correlated side
// information, against a shared center estimate t_tilde with the guarantee
// (x, y) in T_{t_tilde, delta}. Decode is the unique codebook entry in the
// conditionally typical set.
ProtocolOutcome run_sw1(const Seq& x, const Seq& y, const Dist& t_tilde,
                        const ProtocolParams& params, Tapes& tapes, const RunOpts& opts = {});

// Two-round variant: estimation exchange first, then the one-round scheme on
// the estimate.
ProtocolOutcome run_sw2(const Seq& x, const Seq& y, const ProtocolParams& params, Tapes& tapes,
                        const RunOpts& opts = {});

// One-round variant for y generated from x by a known channel: Alice sends
// her exact marginal type; the channel replaces the estimate.
ProtocolOutcome run_sw3(const Seq& x, const Seq& y, const Channel& p_y_given_x,
                        const ProtocolParams& params, Tapes& tapes, const RunOpts& opts = {});

// One-round channel simulation with side information: Alice samples the
// channel locally, then identifies her message inside a shared-randomly
// ordered, rate-filtered type class. Error events: e1 sender typicality, e2
// empty fiber, e3 chosen message not receiver-typical, e4 decode collision.
ProtocolOutcome run_rst1(const Seq& x, const Seq& y, const Dist& t_tilde, const Channel& ch,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts = {});

// Two-round variant: estimation exchange then the one-round simulation.
ProtocolOutcome run_rst2(const Seq& x, const Seq& y, const Channel& ch,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts = {});

// (j+1)-round simulation of a j-round interactive protocol: estimation
// rounds first, then one channel-simulation round per original round with
// the typicality radius widened by delta_prime each time.
ProtocolOutcome run_int2(const Seq& x, const Seq& y, const InteractiveSpec& spec,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts = {});

// j-round variant: the first message is simulated against a product center
// built from Alice's exact marginal type (no side-information gain), and the
// estimation exchange is folded into the first two rounds.
ProtocolOutcome run_int3(const Seq& x, const Seq& y, const InteractiveSpec& spec,
                         const ProtocolParams& params, Tapes& tapes, const RunOpts& opts = {});

}  // namespace typesim
