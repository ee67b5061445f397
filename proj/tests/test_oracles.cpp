#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "typesim/oracles.hpp"
#include "typesim/tape.hpp"

using namespace typesim;

TEST_CASE("concentration bound evaluators") {
  CHECK(bound_eval_hoeffding(10, 20, 100, 0.0) == doctest::Approx(1.0));
  // mu = 200, eps = 0.5 -> e^{-25}.
  CHECK(bound_eval_hoeffding(400, 500, 1000, 0.5) == doctest::Approx(std::exp(-25.0)));
  CHECK(bound_eval_chernoff(100, 0.1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(bound_eval_chernoff(100, 0.1) == doctest::Approx(0.1353352832366127).epsilon(1e-12));
  CHECK_THROWS(bound_eval_hoeffding(0, 1, 10, 0.5));
  CHECK_THROWS(bound_eval_chernoff(-1, 0.1));
}

TEST_CASE("bound report verdicts") {
  MCEstimate m{0.4, 1000, 0.05};
  BoundReport pass = make_bound_report("x", 0.5, true, m);
  CHECK(pass.verdict == Verdict::pass);
  BoundReport fail = make_bound_report("x", 0.3, true, m);
  CHECK(fail.verdict == Verdict::fail);
  // Within the confidence margin is not a failure.
  BoundReport close = make_bound_report("x", 0.36, true, m);
  CHECK(close.verdict == Verdict::pass);
  BoundReport vac = make_bound_report("x", 1.2, true, m);
  CHECK(vac.vacuous);
  CHECK(vac.verdict == Verdict::vacuous_pass);
  BoundReport premise = make_bound_report("x", 0.3, false, m);
  CHECK(premise.vacuous);
  CHECK(premise.verdict == Verdict::vacuous_pass);
}

TEST_CASE("conditional tv estimation") {
  // Deterministic protocol against its own point mass: zero distance.
  std::vector<double> point = {0.0, 1.0, 0.0, 0.0};
  auto det = [](std::uint64_t) { return std::optional<std::uint64_t>(1); };
  ConditionalTvResult r = mc_conditional_tv(det, point, 2000, 1);
  CHECK(r.tv.point == doctest::Approx(0.0));
  CHECK(r.successes == 2000);

  // Biased coin vs its true law.
  std::vector<double> coin = {0.3, 0.7};
  auto flip = [](std::uint64_t i) {
    Tape t(TapeCategory::env, derive_seed(42, i));
    return std::optional<std::uint64_t>(t.draw_unit() < 0.3 ? 0 : 1);
  };
  ConditionalTvResult c1 = mc_conditional_tv(flip, coin, 25000, 0);
  CHECK(c1.tv.point <= c1.tv.ci95);

  // Quadrupling the trials halves the confidence width (within 20%).
  ConditionalTvResult c4 = mc_conditional_tv(flip, coin, 100000, 0);
  double ratio = c4.tv.ci95 / c1.tv.ci95;
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);

  // Aborting trials shrink the success count and are rejected exactly.
  auto aborts = [](std::uint64_t i) {
    if (i % 2 == 0) return std::optional<std::uint64_t>();
    Tape t(TapeCategory::env, derive_seed(43, i));
    return std::optional<std::uint64_t>(t.draw_unit() < 0.3 ? 0 : 1);
  };
  ConditionalTvResult ca = mc_conditional_tv(aborts, coin, 20000, 0);
  CHECK(ca.successes == 10000);
  CHECK(ca.tv.point <= ca.tv.ci95);

  auto never = [](std::uint64_t) { return std::optional<std::uint64_t>(); };
  CHECK_THROWS(mc_conditional_tv(never, coin, 100, 1));
}

TEST_CASE("event rate estimation") {
  auto ev = [](std::uint64_t i) {
    Tape t(TapeCategory::env, derive_seed(44, i));
    return t.draw_unit() < 0.25;
  };
  MCEstimate e = mc_event_rate(ev, 40000, 0);
  CHECK(std::abs(e.point - 0.25) <= e.ci95 + 0.01);
}

TEST_CASE("cardinality suite small sweeps are violation-free") {
  CardinalityConfig cfg;
  cfg.n_max = 5;
  cfg.delta_grid = {0.0, 0.3};
  cfg.channels = {Channel::bsc(0.2)};
  cfg.delta_prime_grid = {0.2};
  cfg.threads = 1;
  CardinalityReport r = verify_cardinality_suite(cfg);
  CHECK(r.ok());
  CHECK(r.checks > 100);

  CardinalityConfig tern = cfg;
  tern.n_max = 4;
  tern.y_arity = 3;
  CardinalityReport r2 = verify_cardinality_suite(tern);
  std::string first = r2.violations.empty() ? std::string() : r2.violations[0];
  CHECK_MESSAGE(r2.ok(), first);
}

TEST_CASE("dual formula check") {
  DualCheckReport r = dual_formula_check(7, 100);
  CHECK(r.instances == 100);
  CHECK_MESSAGE(r.ok(1e-9), r.worst);
}
