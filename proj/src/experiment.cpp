#include "typesim/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "typesim/info_math.hpp"
#include "typesim/parallel.hpp"
#include "typesim/types.hpp"

namespace typesim {

namespace {

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& path) {
  check_arg(j.is_object(), "config node must be an object: " + path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    check_arg(ok, "unknown config key: " + path + "." + it.key());
  }
}

Channel parse_channel(const nlohmann::json& j, const std::string& path) {
  check_keys(j, {"preset", "flip", "input_arity", "output_arity", "symbol", "table"}, path);
  if (j.contains("preset")) {
    std::string p = j.at("preset").get<std::string>();
    if (p == "bsc") return Channel::bsc(j.at("flip").get<double>());
    if (p == "identity") return Channel::identity(j.value("input_arity", 2));
    if (p == "constant")
      return Channel::constant(j.value("input_arity", 2), j.value("output_arity", 2),
                               j.value("symbol", 0));
    throw std::invalid_argument("unknown channel preset at " + path + ": " + p);
  }
  return Channel({j.at("input_arity").get<int>()}, j.at("output_arity").get<int>(),
                 j.at("table").get<std::vector<double>>());
}

std::vector<std::uint8_t> parse_seq(const nlohmann::json& j) {
  std::vector<std::uint8_t> v;
  for (const auto& e : j) v.push_back(static_cast<std::uint8_t>(e.get<int>()));
  return v;
}

InputLaw parse_input(const nlohmann::json& j, const std::string& path) {
  check_keys(j, {"type", "x", "y", "joint_probs", "pairs", "x_probs", "channel"}, path);
  InputLaw law;
  std::string t = j.at("type").get<std::string>();
  if (t == "fixed") {
    law.kind = InputLaw::Kind::fixed;
    law.x_fixed = parse_seq(j.at("x"));
    law.y_fixed = parse_seq(j.at("y"));
  } else if (t == "iid_joint") {
    law.kind = InputLaw::Kind::iid_joint;
    law.joint_probs = j.at("joint_probs").get<std::vector<double>>();
  } else if (t == "adversarial_list") {
    law.kind = InputLaw::Kind::adversarial_list;
    for (const auto& p : j.at("pairs"))
      law.pairs.emplace_back(parse_seq(p.at("x")), parse_seq(p.at("y")));
    check_arg(!law.pairs.empty(), "adversarial_list needs at least one pair");
  } else if (t == "iid_x_channel") {
    law.kind = InputLaw::Kind::iid_x_channel;
    law.x_probs = j.at("x_probs").get<std::vector<double>>();
    law.y_channel = parse_channel(j.at("channel"), path + ".channel");
  } else {
    throw std::invalid_argument("unknown input law: " + t);
  }
  return law;
}

const std::vector<std::string> kProtocols = {
    "estimate",       "sw_fixed_type", "sw_estimated",   "sw_channel_prior",
    "rst_fixed_type", "rst_estimated", "int_plus_round", "int_round_preserving"};

struct Inputs {
  Seq x, y;
};

Inputs make_inputs(const ExperimentConfig& cfg, std::uint64_t trial) {
  Tape env(TapeCategory::env, derive_seed(cfg.seed, trial, 0xe));
  const InputLaw& law = cfg.input;
  std::size_t n = static_cast<std::size_t>(cfg.params.n);
  switch (law.kind) {
    case InputLaw::Kind::fixed:
      return {Seq(cfg.x_arity, law.x_fixed), Seq(cfg.y_arity, law.y_fixed)};
    case InputLaw::Kind::adversarial_list: {
      const auto& p = law.pairs[trial % law.pairs.size()];
      return {Seq(cfg.x_arity, p.first), Seq(cfg.y_arity, p.second)};
    }
    case InputLaw::Kind::iid_joint: {
      check_arg(law.joint_probs.size() ==
                    static_cast<std::size_t>(cfg.x_arity) * static_cast<std::size_t>(cfg.y_arity),
                "joint_probs size mismatch");
      Seq x(cfg.x_arity, std::vector<std::uint8_t>(n, 0));
      Seq y(cfg.y_arity, std::vector<std::uint8_t>(n, 0));
      for (std::size_t i = 0; i < n; ++i) {
        double u = env.draw_unit();
        double acc = 0.0;
        std::size_t cell = law.joint_probs.size() - 1;
        for (std::size_t c = 0; c < law.joint_probs.size(); ++c) {
          acc += law.joint_probs[c];
          if (u < acc) {
            cell = c;
            break;
          }
        }
        x.sym[i] = static_cast<std::uint8_t>(cell / static_cast<std::size_t>(cfg.y_arity));
        y.sym[i] = static_cast<std::uint8_t>(cell % static_cast<std::size_t>(cfg.y_arity));
      }
      return {std::move(x), std::move(y)};
    }
    case InputLaw::Kind::iid_x_channel: {
      check_arg(law.x_probs.size() == static_cast<std::size_t>(cfg.x_arity),
                "x_probs size mismatch");
      Seq x(cfg.x_arity, std::vector<std::uint8_t>(n, 0));
      for (std::size_t i = 0; i < n; ++i) {
        double u = env.draw_unit();
        double acc = 0.0;
        int sym = cfg.x_arity - 1;
        for (int c = 0; c < cfg.x_arity; ++c) {
          acc += law.x_probs[static_cast<std::size_t>(c)];
          if (u < acc) {
            sym = c;
            break;
          }
        }
        x.sym[i] = static_cast<std::uint8_t>(sym);
      }
      Seq y = apply_channel(*law.y_channel, x, env);
      return {std::move(x), std::move(y)};
    }
  }
  throw std::logic_error("unreachable");
}

InteractiveSpec interactive_spec(const ExperimentConfig& cfg) {
  return InteractiveSpec::from_presets(cfg.x_arity, cfg.y_arity, cfg.channels);
}

int ceil_pos(double v) { return static_cast<int>(std::ceil(v - 1e-12)); }

// Ledger-vs-formula checks on the true joint type of this trial's inputs.
void sw_checks(TrialRow& row, const ExperimentConfig& cfg, const Inputs& in) {
  if (!row.outcome.ok()) return;
  Dist t = joint_empirical_type(in.x, in.y).to_dist();
  double cap = cfg.params.n * (conditional_entropy(t, {0}, {1}) +
                               eta1(cfg.params, cfg.x_arity, cfg.y_arity));
  row.comm_bound_ok = row.outcome.ledger.comm_total() <=
                      static_cast<std::uint64_t>(std::max(0, ceil_pos(cap)));
}

void rst_checks(TrialRow& row, const ExperimentConfig& cfg, const Inputs& in, const Channel& ch) {
  if (!row.outcome.ok()) return;
  Dist t = joint_empirical_type(in.x, in.y).to_dist();
  Dist md = append_channel(t.with_trivial_axis(),
                           ch.reshape_inputs({cfg.x_arity, 1}), {0, 2});
  double n = cfg.params.n;
  DerivedDeltas dd = derived_deltas(cfg.params, ch.output_arity, cfg.x_arity, cfg.y_arity);
  double comm_cap =
      n * (rst_I_m_x_given_y(md) + eta2(cfg.params, ch.output_arity, cfg.x_arity, cfg.y_arity,
                                        dd.dmax));
  if (cfg.mode == RandMode::unbounded)
    row.comm_bound_ok =
        row.outcome.ledger.comm_total() <= static_cast<std::uint64_t>(std::max(0, ceil_pos(comm_cap)));
  double sr_cap = std::ceil(n * rst_H_m_given_xy(md)) + 1.0;
  row.sr_bound_ok = static_cast<double>(row.outcome.ledger.shared_rate) <= sr_cap;
  row.output_equals_x = row.outcome.bob_out[0] == in.x;
}

void int_checks(TrialRow& row, const ExperimentConfig& cfg, const Inputs& in,
                const InteractiveSpec& spec) {
  int j = spec.rounds();
  int m_max = 0;
  std::int64_t m_prod = 1;
  for (int i = 0; i < j; ++i) {
    m_max = std::max(m_max, spec.message_arity(i));
    m_prod *= spec.message_arity(i);
  }
  double n = cfg.params.n;
  if (cfg.protocol == "int_round_preserving" && !row.outcome.ledger.messages.empty()) {
    DerivedDeltas dd = derived_deltas(cfg.params, m_max, cfg.x_arity, cfg.y_arity);
    double cap1 = cap_int3_round1(cfg.params, cfg.x_arity, spec.message_arity(0), dd.dmin);
    row.first_msg_cap_ok = static_cast<double>(row.outcome.ledger.round_bits(0)) <= cap1 + 1e-9;
  }
  if (!row.outcome.ok()) return;
  Dist t = joint_empirical_type(in.x, in.y).to_dist();
  if (cfg.mode == RandMode::unbounded) {
    double cap = n * (information_complexity(t, spec) +
                      cfg.params.delta_s *
                          std::log2(static_cast<double>(cfg.x_arity) * cfg.y_arity) +
                      eta3(cfg.params, j, m_max, m_prod, cfg.x_arity, cfg.y_arity));
    row.comm_bound_ok =
        row.outcome.ledger.comm_total() <= static_cast<std::uint64_t>(std::max(0, ceil_pos(cap)));
  }
  std::vector<int> ms;
  for (int i = 0; i < j; ++i) ms.push_back(2 + i);
  double sr_cap =
      std::ceil(n * conditional_entropy(joint_with_transcript(t, spec), ms, {0, 1})) +
      static_cast<double>(j);
  row.sr_bound_ok = static_cast<double>(row.outcome.ledger.shared_rate) <= sr_cap;
}

std::uint64_t transcript_code(const InteractiveSpec& spec, const std::vector<Seq>& msgs) {
  std::uint64_t f = 0;
  for (int i = 0; i < spec.rounds(); ++i) {
    std::size_t space = 1;
    for (std::size_t k = 0; k < msgs[static_cast<std::size_t>(i)].n(); ++k)
      space *= static_cast<std::size_t>(spec.message_arity(i));
    f = f * space + seq_code(msgs[static_cast<std::size_t>(i)]);
  }
  return f;
}

TrialRow run_one(const ExperimentConfig& cfg, std::uint64_t trial) {
  Inputs in = make_inputs(cfg, trial);
  Tapes tapes = Tapes::from_seed(cfg.seed, trial);
  RunOpts opts{cfg.mode, cfg.transmit_seed, nullptr};
  TrialRow row;
  if (cfg.protocol == "estimate") {
    EstimateOutcome e = estimate_joint_type(in.x, in.y, cfg.params, tapes, opts);
    row.outcome.ledger = e.ledger;
    row.outcome.estimate = e.t_tilde;
    JointType t = joint_empirical_type(in.x, in.y);
    row.outcome.estimate_within_delta = l1_type_dist(t, e.t_tilde) <= cfg.params.delta + 1e-12;
    double max_dev = 0.0;
    for (std::size_t c = 0; c < t.cells(); ++c)
      max_dev = std::max(max_dev, std::abs(static_cast<double>(t.counts[c]) / t.n -
                                           e.t_tilde.p[c]));
    row.est_max_dev_ok = max_dev <= cfg.params.delta + 1e-12;
    row.decoded_correct = row.est_max_dev_ok;
    return row;
  }
  if (cfg.protocol == "sw_fixed_type") {
    Dist t = joint_empirical_type(in.x, in.y).to_dist();
    row.outcome = run_sw1(in.x, in.y, t, cfg.params, tapes, opts);
    row.decoded_correct = row.outcome.ok() && row.outcome.bob_out[0] == in.x;
    sw_checks(row, cfg, in);
    return row;
  }
  if (cfg.protocol == "sw_estimated") {
    row.outcome = run_sw2(in.x, in.y, cfg.params, tapes, opts);
    row.decoded_correct = row.outcome.ok() && row.outcome.bob_out[0] == in.x;
    sw_checks(row, cfg, in);
    return row;
  }
  if (cfg.protocol == "sw_channel_prior") {
    check_arg(!cfg.channels.empty(), "sw_channel_prior needs a channel");
    row.outcome = run_sw3(in.x, in.y, cfg.channels[0], cfg.params, tapes, opts);
    row.decoded_correct = row.outcome.ok() && row.outcome.bob_out[0] == in.x;
    return row;
  }
  if (cfg.protocol == "rst_fixed_type" || cfg.protocol == "rst_estimated") {
    check_arg(!cfg.channels.empty(), "rst protocols need a channel");
    if (cfg.protocol == "rst_fixed_type") {
      Dist t = joint_empirical_type(in.x, in.y).to_dist();
      row.outcome = run_rst1(in.x, in.y, t, cfg.channels[0], cfg.params, tapes, opts);
    } else {
      row.outcome = run_rst2(in.x, in.y, cfg.channels[0], cfg.params, tapes, opts);
    }
    row.decoded_correct = row.outcome.ok() && row.outcome.agree();
    rst_checks(row, cfg, in, cfg.channels[0]);
    if (row.outcome.ok()) {
      row.outcome_code = seq_code(row.outcome.bob_out[0]);
      row.outcome_code_valid = true;
    }
    return row;
  }
  if (cfg.protocol == "int_plus_round" || cfg.protocol == "int_round_preserving") {
    InteractiveSpec spec = interactive_spec(cfg);
    row.outcome = cfg.protocol == "int_plus_round"
                      ? run_int2(in.x, in.y, spec, cfg.params, tapes, opts)
                      : run_int3(in.x, in.y, spec, cfg.params, tapes, opts);
    row.decoded_correct = row.outcome.ok() && row.outcome.agree();
    int_checks(row, cfg, in, spec);
    if (row.outcome.ok()) {
      row.outcome_code = transcript_code(spec, row.outcome.bob_out);
      row.outcome_code_valid = true;
    }
    return row;
  }
  throw std::invalid_argument("unknown protocol: " + cfg.protocol);
}

std::string row_to_csv(const ExperimentConfig& cfg, std::uint64_t trial, const TrialRow& row) {
  const CostLedger& l = row.outcome.ledger;
  std::ostringstream os;
  os << trial << ',' << cfg.protocol << ','
     << (row.outcome.ok() ? "success" : "abort") << ',' << error_name(row.outcome.event) << ','
     << (row.outcome.estimate_within_delta ? 1 : 0) << ',' << l.round_count() << ','
     << l.comm_total() << ',';
  auto rounds = l.rounds();
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    os << (rounds[i].first == Direction::a_to_b ? "A>B:" : "B>A:") << rounds[i].second;
    if (i + 1 < rounds.size()) os << '|';
  }
  os << ',' << l.shared_structural << ',' << l.shared_rate << ',' << l.private_a << ','
     << l.private_b << ',' << (row.decoded_correct ? 1 : 0);
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  check_keys(j,
             {"protocol", "x_arity", "y_arity", "channels", "input", "params", "mode",
              "transmit_seed", "trials", "seed", "threads", "out"},
             "config");
  ExperimentConfig cfg;
  cfg.protocol = j.at("protocol").get<std::string>();
  bool known = false;
  for (const auto& p : kProtocols) known |= (p == cfg.protocol);
  check_arg(known, "unknown protocol: " + cfg.protocol);
  cfg.x_arity = j.value("x_arity", 2);
  cfg.y_arity = j.value("y_arity", 2);
  if (j.contains("channels")) {
    int idx = 0;
    for (const auto& c : j.at("channels"))
      cfg.channels.push_back(parse_channel(c, "channels[" + std::to_string(idx++) + "]"));
  }
  cfg.input = parse_input(j.at("input"), "input");
  if (j.contains("params")) {
    const auto& p = j.at("params");
    check_keys(p,
               {"n", "m_samples", "delta", "delta_prime", "delta_double_prime", "delta_s",
                "slack_inv_n", "slack_one"},
               "params");
    cfg.params.n = p.value("n", 8);
    cfg.params.m_samples = p.value("m_samples", 0);
    cfg.params.delta = p.value("delta", 0.1);
    cfg.params.delta_prime = p.value("delta_prime", 0.1);
    cfg.params.delta_double_prime = p.value("delta_double_prime", 0.1);
    cfg.params.delta_s = p.value("delta_s", 0.2);
    cfg.params.o.slack_inv_n = p.value("slack_inv_n", 4.0);
    cfg.params.o.slack_one = p.value("slack_one", 4.0);
  }
  std::string mode = j.value("mode", std::string("unbounded"));
  check_arg(mode == "unbounded" || mode == "newman", "mode must be unbounded|newman");
  cfg.mode = mode == "newman" ? RandMode::newman : RandMode::unbounded;
  cfg.transmit_seed = j.value("transmit_seed", false);
  cfg.trials = j.value("trials", 1000ull);
  cfg.seed = j.value("seed", 1ull);
  cfg.threads = j.value("threads", 0);
  cfg.out_dir = j.value("out", std::string());
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  check_arg(f.good(), "cannot open config file: " + path);
  nlohmann::json j;
  f >> j;
  return parse_config(j);
}

nlohmann::json bound_report_json(const BoundReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["bound"] = r.bound_value;
  j["vacuous"] = r.vacuous;
  j["measured"] = r.measured.point;
  j["trials"] = r.measured.trials;
  j["ci95"] = r.measured.ci95;
  j["verdict"] = verdict_name(r.verdict);
  if (!r.witness.empty()) j["witness"] = r.witness;
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.params.validate();
  std::vector<TrialRow> rows(cfg.trials);
  parallel_trials(cfg.trials, cfg.threads,
                  [&](std::size_t i) { rows[i] = run_one(cfg, static_cast<std::uint64_t>(i)); });

  std::ostringstream csv;
  csv << "trial,protocol,status,error,est_in_tol,rounds,comm_bits,round_bits,"
         "shared_structural_bits,shared_rate_bits,private_a_bits,private_b_bits,decoded_correct\n";
  for (std::uint64_t i = 0; i < cfg.trials; ++i)
    csv << row_to_csv(cfg, i, rows[i]) << '\n';

  // Aggregates.
  std::uint64_t successes = 0, correct = 0, equals_x = 0, agree_viol = 0;
  std::uint64_t comm_viol = 0, sr_viol = 0, cap1_viol = 0, est_dev_fail = 0;
  std::map<std::string, std::uint64_t> aborts;
  std::map<int, std::uint64_t> rounds_hist;
  double mean_cc = 0.0, mean_rate = 0.0, mean_struct = 0.0;
  for (const auto& r : rows) {
    if (r.outcome.ok()) {
      ++successes;
      mean_cc += static_cast<double>(r.outcome.ledger.comm_total());
      mean_rate += static_cast<double>(r.outcome.ledger.shared_rate);
      mean_struct += static_cast<double>(r.outcome.ledger.shared_structural);
      ++rounds_hist[r.outcome.ledger.round_count()];
      if (!r.outcome.agree()) ++agree_viol;
    } else {
      ++aborts[error_name(r.outcome.event)];
    }
    if (r.decoded_correct) ++correct;
    if (r.output_equals_x) ++equals_x;
    if (!r.comm_bound_ok) ++comm_viol;
    if (!r.sr_bound_ok) ++sr_viol;
    if (!r.first_msg_cap_ok) ++cap1_viol;
    if (!r.est_max_dev_ok) ++est_dev_fail;
  }
  double n = static_cast<double>(cfg.params.n);
  nlohmann::json summary;
  summary["schema_version"] = 1;
  summary["protocol"] = cfg.protocol;
  summary["trials"] = cfg.trials;
  summary["successes"] = successes;
  summary["decoded_correct"] = correct;
  summary["output_equals_x"] = equals_x;
  summary["agreement_violations"] = agree_viol;
  summary["comm_bound_violations"] = comm_viol;
  summary["sr_bound_violations"] = sr_viol;
  summary["first_msg_cap_violations"] = cap1_viol;
  summary["est_max_dev_failures"] = est_dev_fail;
  summary["aborts"] = aborts;
  {
    nlohmann::json rh;
    for (const auto& [k, v] : rounds_hist) rh[std::to_string(k)] = v;
    summary["rounds_histogram_success"] = rh;
  }
  summary["empirical_failure_rate"] =
      cfg.trials ? 1.0 - static_cast<double>(successes) / static_cast<double>(cfg.trials) : 0.0;
  if (successes > 0) {
    summary["mean_cc_per_n"] = mean_cc / static_cast<double>(successes) / n;
    summary["mean_sr_rate_per_n"] = mean_rate / static_cast<double>(successes) / n;
    summary["mean_sr_structural_per_n"] = mean_struct / static_cast<double>(successes) / n;
  }

  // Bound reports.
  std::vector<BoundReport> reports;
  if (cfg.trials > 0) {
    MCEstimate fail_rate;
    fail_rate.trials = cfg.trials;
    fail_rate.point = summary["empirical_failure_rate"].get<double>();
    fail_rate.ci95 =
        1.96 * std::sqrt(fail_rate.point * (1.0 - fail_rate.point) /
                         static_cast<double>(cfg.trials)) +
        1.0 / static_cast<double>(cfg.trials);
    int m_ar = cfg.channels.empty() ? 2 : cfg.channels[0].output_arity;
    DerivedDeltas dd = derived_deltas(cfg.params, m_ar, cfg.x_arity, cfg.y_arity);
    if (cfg.protocol == "estimate") {
      MCEstimate dev;
      dev.trials = cfg.trials;
      dev.point = static_cast<double>(est_dev_fail) / static_cast<double>(cfg.trials);
      dev.ci95 = 1.96 * std::sqrt(dev.point * (1.0 - dev.point) / static_cast<double>(cfg.trials)) +
                 1.0 / static_cast<double>(cfg.trials);
      reports.push_back(make_bound_report(
          "estimate_dev_rate",
          estimate_failure_bound(cfg.params.samples(), cfg.params.delta, cfg.x_arity, cfg.y_arity),
          true, dev));
    } else if (cfg.protocol == "sw_fixed_type") {
      reports.push_back(make_bound_report("abort_rate", std::exp2(-n * cfg.params.delta), true,
                                          fail_rate));
    } else if (cfg.protocol == "sw_estimated") {
      reports.push_back(make_bound_report(
          "abort_rate", std::exp2(-n * cfg.params.delta * cfg.params.delta), true, fail_rate));
    } else if (cfg.protocol == "sw_channel_prior") {
      double dp = cfg.params.delta * cfg.params.delta / (2.0 * std::log(2.0)) -
                  2.0 / n * cfg.y_arity * cfg.x_arity * std::log2(n + 1.0) - 2.0 / n;
      reports.push_back(
          make_bound_report("abort_rate", std::exp2(-n * dp), dp > 0.0, fail_rate));
    } else if (cfg.protocol == "rst_fixed_type" || cfg.protocol == "rst_estimated") {
      reports.push_back(make_bound_report("abort_rate",
                                          std::min(1.0, std::exp2(-n * dd.dmin * dd.dmin + 3.0)),
                                          dd.premise, fail_rate));
    } else if (cfg.protocol == "int_plus_round" || cfg.protocol == "int_round_preserving") {
      double jd = static_cast<double>(cfg.channels.size());
      reports.push_back(make_bound_report(
          "abort_rate", std::min(1.0, jd * std::exp2(-n * dd.dmin * dd.dmin + 3.0)), dd.premise,
          fail_rate));
    }

    // Success-conditioned output law vs the exact reference, when computable.
    if (cfg.input.kind == InputLaw::Kind::fixed && successes > 0) {
      std::vector<double> ref;
      double bound = 0.0;
      bool premise = cfg.params.delta_prime > 0 && cfg.params.delta_double_prime > 0;
      if ((cfg.protocol == "rst_fixed_type" || cfg.protocol == "rst_estimated") &&
          std::pow(static_cast<double>(cfg.channels[0].output_arity), n) <=
              static_cast<double>(kEnumCap)) {
        ref = exact_output_distribution(cfg.channels[0], Seq(cfg.x_arity, cfg.input.x_fixed));
        bound = std::exp2(-n * dd.ddd) + cfg.params.delta_double_prime;
      } else if (cfg.protocol == "int_plus_round" || cfg.protocol == "int_round_preserving") {
        InteractiveSpec spec = interactive_spec(cfg);
        double cells = 1.0;
        for (int i = 0; i < spec.rounds(); ++i)
          cells *= std::pow(static_cast<double>(spec.message_arity(i)), n);
        if (cells <= static_cast<double>(kEnumCap)) {
          TranscriptDist td = exact_transcript_distribution(
              spec, Seq(cfg.x_arity, cfg.input.x_fixed), Seq(cfg.y_arity, cfg.input.y_fixed));
          ref = td.p;
          bound = static_cast<double>(spec.rounds()) *
                  (std::exp2(-n * dd.ddd) + cfg.params.delta_double_prime);
        }
      }
      if (!ref.empty()) {
        std::vector<double> hist(ref.size(), 0.0);
        for (const auto& r : rows)
          if (r.outcome_code_valid) hist[static_cast<std::size_t>(r.outcome_code)] += 1.0;
        double tv = 0.0;
        for (std::size_t c = 0; c < ref.size(); ++c)
          tv += std::abs(hist[c] / static_cast<double>(successes) - ref[c]);
        MCEstimate m;
        m.point = 0.5 * tv;
        m.trials = successes;
        m.ci95 = 1.96 * std::sqrt(static_cast<double>(ref.size()) /
                                  (4.0 * static_cast<double>(successes)));
        reports.push_back(make_bound_report("output_tv", bound, premise, m));
      }
    }

    // Hard per-row conformance: zero violations expected.
    auto frac = [&](std::uint64_t v) {
      MCEstimate m;
      m.trials = cfg.trials;
      m.point = static_cast<double>(v) / static_cast<double>(cfg.trials);
      m.ci95 = 0.0;
      return m;
    };
    if (cfg.mode == RandMode::unbounded && cfg.protocol != "estimate" &&
        cfg.protocol != "sw_channel_prior")
      reports.push_back(make_bound_report("comm_bound_violations", 0.0, true, frac(comm_viol)));
    if (cfg.protocol == "rst_fixed_type" || cfg.protocol == "rst_estimated" ||
        cfg.protocol == "int_plus_round" || cfg.protocol == "int_round_preserving") {
      reports.push_back(make_bound_report("sr_bound_violations", 0.0, true, frac(sr_viol)));
      reports.push_back(
          make_bound_report("agreement_violations", 0.0, true, frac(agree_viol)));
    }
    if (cfg.protocol == "int_round_preserving")
      reports.push_back(
          make_bound_report("first_msg_cap_violations", 0.0, true, frac(cap1_viol)));
  }
  {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(bound_report_json(r));
    summary["bound_reports"] = arr;
  }
  summary["params"] = {{"n", cfg.params.n},
                       {"m_samples", cfg.params.samples()},
                       {"delta", cfg.params.delta},
                       {"delta_prime", cfg.params.delta_prime},
                       {"delta_double_prime", cfg.params.delta_double_prime},
                       {"delta_s", cfg.params.delta_s},
                       {"slack_inv_n", cfg.params.o.slack_inv_n},
                       {"slack_one", cfg.params.o.slack_one}};
  auto now = std::chrono::system_clock::now();
  summary["metadata"] = {
      {"timestamp",
       static_cast<std::int64_t>(
           std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count())},
      {"seed", cfg.seed},
      {"threads", cfg.threads}};

  ExperimentResult res;
  res.csv = csv.str();
  res.summary = std::move(summary);
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream fc(cfg.out_dir + "/trials.csv", std::ios::binary);
    fc << res.csv;
    std::ofstream fs(cfg.out_dir + "/summary.json", std::ios::binary);
    fs << res.summary.dump(2) << '\n';
  }
  return res;
}

}  // namespace typesim
