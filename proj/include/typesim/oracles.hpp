#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "typesim/channel.hpp"
#include "typesim/rates.hpp"

namespace typesim {

struct MCEstimate {
  double point = 0.0;
  std::uint64_t trials = 0;
  double ci95 = 0.0;
};

enum class Verdict { pass, vacuous_pass, fail };
const char* verdict_name(Verdict v);

// Honest bound bookkeeping: bounds that evaluate to >= 1 (for probabilities)
// or whose derivation premise fails are vacuous and reported as such, never
// silently passed; fail requires the measurement to clear the bound by more
// than its confidence margin.
struct BoundReport {
  std::string name;
  double bound_value = 0.0;
  bool vacuous = false;
  MCEstimate measured;
  Verdict verdict = Verdict::pass;
  std::string witness;
};

BoundReport make_bound_report(std::string name, double bound, bool premise_ok,
                              const MCEstimate& measured, std::string witness = "");

// e^{-mu eps^2 / 2} with mu = u v / q (expected intersection of random subsets).
double bound_eval_hoeffding(double u, double v, double q, double eps);
// e^{-2 n delta^2}.
double bound_eval_chernoff(double n, double delta);

// Runs `trials` independent simulations; each returns the outcome index on
// success or nullopt on abort. Builds the success-conditioned histogram and
// its total variation distance to the exact reference law.
struct ConditionalTvResult {
  MCEstimate tv;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  std::vector<double> histogram;
};

ConditionalTvResult mc_conditional_tv(
    const std::function<std::optional<std::uint64_t>(std::uint64_t)>& sample,
    const std::vector<double>& exact_reference, std::uint64_t trials, int threads = 0);

// Binomial rate estimate with a 95% CI.
MCEstimate mc_event_rate(const std::function<bool(std::uint64_t)>& event, std::uint64_t trials,
                         int threads = 0);

// Exhaustive verification of the type-counting bounds: class cardinalities,
// the conditional-class partition identity, typical-set cardinalities and the
// receiver-set upper bound, for every joint type in the sweep.
struct CardinalityConfig {
  int n_max = 8;
  int x_arity = 2;
  int y_arity = 2;
  std::vector<double> delta_grid = {0.0, 0.25};
  std::vector<Channel> channels;  // p(m|x) for receiver-set and output-probability checks
  std::vector<double> delta_prime_grid = {0.15};
  int threads = 0;
};

struct CardinalityReport {
  std::uint64_t checks = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

CardinalityReport verify_cardinality_suite(const CardinalityConfig& cfg);

// A second, independently written evaluator of the rate and slack formulas,
// compared against rate_bounds on randomized instances.
struct DualCheckReport {
  double max_abs_diff = 0.0;
  std::uint64_t instances = 0;
  std::string worst;
  bool ok(double tol = 1e-9) const { return max_abs_diff < tol; }
};

DualCheckReport dual_formula_check(std::uint64_t seed, int instances);

}  // namespace typesim
