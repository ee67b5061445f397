#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "typesim/channel.hpp"
#include "typesim/interactive.hpp"
#include "typesim/oracles.hpp"
#include "typesim/protocols.hpp"

namespace typesim {

// Batch experiment description, loadable from JSON. Unknown keys are
// rejected with the offending path.
struct InputLaw {
  enum class Kind { fixed, iid_joint, adversarial_list, iid_x_channel } kind = Kind::iid_joint;
  std::vector<std::uint8_t> x_fixed, y_fixed;
  std::vector<double> joint_probs;                       // row-major over (x, y)
  std::vector<std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>> pairs;
  std::vector<double> x_probs;                           // for iid_x_channel
  std::optional<Channel> y_channel;                      // for iid_x_channel
};

struct ExperimentConfig {
  std::string protocol;  // estimate | sw_fixed_type | sw_estimated | sw_channel_prior |
                         // rst_fixed_type | rst_estimated | int_plus_round | int_round_preserving
  int x_arity = 2;
  int y_arity = 2;
  std::vector<Channel> channels;  // single-input channels, lifted per round for interactive runs
  InputLaw input;
  ProtocolParams params;
  RandMode mode = RandMode::unbounded;
  bool transmit_seed = false;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir;  // empty: no files written
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

struct ExperimentResult {
  std::string csv;
  nlohmann::json summary;
  int exit_status = 0;
};

// Runs the configured protocol for `trials` independent trials with per-trial
// derived seeds, emits one CSV row per trial plus a JSON summary with bound
// reports. Byte-identical outputs for identical (config, seed) regardless of
// thread count; the summary's metadata block holds the only timestamp.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Summary of a finished trial as used by the CSV writer and the tests.
// Conformance flags compare the ledger against the rate formulas evaluated on
// the trial's true joint type.
struct TrialRow {
  ProtocolOutcome outcome;
  bool decoded_correct = false;
  bool output_equals_x = false;
  bool comm_bound_ok = true;
  bool sr_bound_ok = true;
  bool first_msg_cap_ok = true;
  bool est_max_dev_ok = true;
  std::uint64_t outcome_code = 0;
  bool outcome_code_valid = false;
};

nlohmann::json bound_report_json(const BoundReport& r);

}  // namespace typesim
