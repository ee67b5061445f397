#include <iostream>

#include "CLI11.hpp"
#include "typesim/acceptance.hpp"
#include "typesim/experiment.hpp"
#include "typesim/oracles.hpp"

namespace {

// Shared flags: a config file plus overrides.
struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string out;
  std::string mode;
  int threads = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)");
    cmd->add_option("--seed", seed, "master seed override");
    cmd->add_option("--trials", trials, "trial count override");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--mode", mode, "randomness mode: unbounded|newman");
    cmd->add_option("--threads", threads, "worker threads (1 = serial)");
  }

  typesim::ExperimentConfig resolve(const std::string& default_protocol) const {
    typesim::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = typesim::load_config_file(config_path);
    } else {
      cfg.protocol = default_protocol;
      cfg.input.kind = typesim::InputLaw::Kind::iid_joint;
      cfg.input.joint_probs = {0.4, 0.1, 0.1, 0.4};
      if (default_protocol == "rst_fixed_type" || default_protocol == "rst_estimated")
        cfg.channels = {typesim::Channel::bsc(0.2)};
      if (default_protocol == "sw_channel_prior") cfg.channels = {typesim::Channel::bsc(0.1)};
      if (default_protocol == "int_plus_round" || default_protocol == "int_round_preserving")
        cfg.channels = {typesim::Channel::bsc(0.2), typesim::Channel::bsc(0.3)};
      if (default_protocol == "int_plus_round" || default_protocol == "int_round_preserving")
        cfg.params.n = 6;
      if (default_protocol == "estimate") {
        cfg.params.n = 1000;
        cfg.params.m_samples = 200;
      }
    }
    if (seed) cfg.seed = seed;
    if (trials) cfg.trials = trials;
    if (!out.empty()) cfg.out_dir = out;
    if (!mode.empty()) {
      typesim::check_arg(mode == "unbounded" || mode == "newman", "mode must be unbounded|newman");
      cfg.mode = mode == "newman" ? typesim::RandMode::newman : typesim::RandMode::unbounded;
    }
    if (threads >= 0) cfg.threads = threads;
    return cfg;
  }
};

int run_and_report(const typesim::ExperimentConfig& cfg) {
  typesim::ExperimentResult res = typesim::run_experiment(cfg);
  std::cout << res.summary.dump(2) << "\n";
  for (const auto& rep : res.summary.at("bound_reports"))
    if (rep.at("verdict") == "fail") return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"method-of-types protocol simulator and verification harness"};
  app.require_subcommand(1);

  CommonArgs vt, est, sw, rst, inter, acc, runc;

  auto* cmd_vt = app.add_subcommand("verify-types", "exhaustive type-counting verification");
  int vt_nmax = 8;
  cmd_vt->add_option("--n-max", vt_nmax, "largest sequence length in the sweep");
  vt.attach(cmd_vt);

  auto* cmd_est = app.add_subcommand("estimate", "joint-type estimation experiment");
  est.attach(cmd_est);

  auto* cmd_sw = app.add_subcommand("slepian-wolf", "source coding with side information");
  std::string sw_variant = "fixed-type";
  cmd_sw->add_option("--variant", sw_variant, "fixed-type | estimated | channel-prior");
  sw.attach(cmd_sw);

  auto* cmd_rst = app.add_subcommand("reverse-shannon", "channel simulation with side information");
  std::string rst_variant = "fixed-type";
  cmd_rst->add_option("--variant", rst_variant, "fixed-type | estimated");
  rst.attach(cmd_rst);

  auto* cmd_int = app.add_subcommand("interactive", "interactive protocol simulation");
  std::string int_variant = "extra-round";
  cmd_int->add_option("--variant", int_variant, "extra-round | round-preserving");
  inter.attach(cmd_int);

  auto* cmd_run = app.add_subcommand("run", "run an experiment config as-is");
  runc.attach(cmd_run);

  auto* cmd_acc = app.add_subcommand("acceptance", "full acceptance suite");
  acc.attach(cmd_acc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_vt->parsed()) {
      typesim::CardinalityConfig cfg;
      cfg.n_max = vt_nmax;
      cfg.channels = {typesim::Channel::identity(2), typesim::Channel::bsc(0.2)};
      if (vt.threads >= 0) cfg.threads = vt.threads;
      typesim::CardinalityReport rep = typesim::verify_cardinality_suite(cfg);
      std::cout << "checks: " << rep.checks << "\nviolations: " << rep.violations.size() << "\n";
      for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
      return rep.ok() ? 0 : 1;
    }
    if (cmd_est->parsed()) return run_and_report(est.resolve("estimate"));
    if (cmd_sw->parsed()) {
      std::string p = sw_variant == "estimated"
                          ? "sw_estimated"
                          : (sw_variant == "channel-prior" ? "sw_channel_prior" : "sw_fixed_type");
      return run_and_report(sw.resolve(p));
    }
    if (cmd_rst->parsed())
      return run_and_report(
          rst.resolve(rst_variant == "estimated" ? "rst_estimated" : "rst_fixed_type"));
    if (cmd_int->parsed())
      return run_and_report(inter.resolve(
          int_variant == "round-preserving" ? "int_round_preserving" : "int_plus_round"));
    if (cmd_run->parsed()) {
      typesim::check_arg(!runc.config_path.empty(), "run requires --config");
      return run_and_report(runc.resolve(""));
    }
    if (cmd_acc->parsed()) {
      typesim::AcceptanceOptions o;
      if (acc.seed) o.seed = acc.seed;
      if (!acc.out.empty()) o.out_dir = acc.out;
      if (acc.threads >= 0) o.threads = acc.threads;
      return typesim::run_acceptance(o, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
