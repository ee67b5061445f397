#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "typesim/info_math.hpp"
#include "typesim/tape.hpp"

using namespace typesim;

namespace {

// Independent oracle: entropy by direct summation, natural log rescaled.
double brute_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h / std::log(2.0);
}

Dist random_dist(Tape& env, std::vector<int> ar) {
  std::vector<double> w(product_of_arities(ar));
  double s = 0.0;
  for (auto& v : w) {
    v = env.draw_unit() + 1e-4;
    s += v;
  }
  for (auto& v : w) v /= s;
  return Dist(std::move(ar), std::move(w));
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_THROWS(Dist({2}, {0.6, 0.5}));
  CHECK_THROWS(Dist({2}, {1.2, -0.2}));
  CHECK_THROWS(Dist({2}, {0.5, 0.5, 0.0}));
}

TEST_CASE("entropy basics") {
  CHECK(shannon_entropy(Dist({2}, {0.5, 0.5}), {0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(shannon_entropy(Dist({4}, {1.0, 0.0, 0.0, 0.0}), {0}) == doctest::Approx(0.0));
  double expected = brute_entropy({0.25, 0.75});
  CHECK(expected == doctest::Approx(0.8112781244591328).epsilon(1e-12));
  CHECK(shannon_entropy(Dist({2}, {0.25, 0.75}), {0}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS(shannon_entropy(Dist({2}, {0.5, 0.5}), {}));
}

TEST_CASE("conditional entropy identities") {
  // Independent product: H(X|Y) = H(X).
  Dist prod = product(Dist({2}, {0.3, 0.7}), Dist({3}, {0.2, 0.5, 0.3}));
  CHECK(conditional_entropy(prod, {0}, {1}) ==
        doctest::Approx(shannon_entropy(prod, {0})).epsilon(1e-12));
  // Perfect copy: H(X|Y) = 0.
  Dist copy({2, 2}, {0.4, 0.0, 0.0, 0.6});
  CHECK(conditional_entropy(copy, {0}, {1}) == doctest::Approx(0.0).epsilon(1e-12));
  // Random joint: H(X|Y) == H(XY) - H(Y) exactly.
  Tape env(TapeCategory::env, 11);
  for (int i = 0; i < 20; ++i) {
    Dist d = random_dist(env, {2, 2});
    CHECK(std::abs(conditional_entropy(d, {0}, {1}) -
                   (shannon_entropy(d, {0, 1}) - shannon_entropy(d, {1}))) < 1e-12);
  }
  CHECK_THROWS(conditional_entropy(copy, {0}, {0}));
}

TEST_CASE("mutual information") {
  Dist prod = product(Dist({2}, {0.3, 0.7}), Dist({2}, {0.6, 0.4}));
  CHECK(mutual_information(prod, {0}, {1}) == doctest::Approx(0.0).epsilon(1e-12));
  Dist corr({2, 2}, {0.5, 0.0, 0.0, 0.5});
  CHECK(mutual_information(corr, {0}, {1}) == doctest::Approx(1.0).epsilon(1e-12));
  // Uniform input through a binary symmetric channel: 1 - h2(f).
  double f = 0.2;
  Dist bsc({2, 2}, {0.5 * (1 - f), 0.5 * f, 0.5 * f, 0.5 * (1 - f)});
  double analytic = 1.0 - (-f * std::log2(f) - (1 - f) * std::log2(1 - f));
  CHECK(analytic == doctest::Approx(0.2780719051126377).epsilon(1e-12));
  CHECK(mutual_information(bsc, {0}, {1}) == doctest::Approx(analytic).epsilon(1e-12));
  Tape env(TapeCategory::env, 12);
  for (int i = 0; i < 50; ++i) {
    Dist d = random_dist(env, {3, 2});
    CHECK(std::abs(mutual_information(d, {0}, {1}) - mutual_information(d, {1}, {0})) < 1e-12);
    CHECK(mutual_information(d, {0}, {1}) > -1e-12);
    CHECK(conditional_entropy(d, {0}, {1}) <= shannon_entropy(d, {0}) + 1e-12);
  }
}

TEST_CASE("conditional mutual information and chain rule") {
  // Markov a - c - b: I(a;b|c) = 0. Build p(c) p(a|c) p(b|c).
  std::vector<double> p(8);
  double pc[2] = {0.3, 0.7};
  double pa[2][2] = {{0.9, 0.1}, {0.2, 0.8}};
  double pb[2][2] = {{0.5, 0.5}, {0.1, 0.9}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        p[static_cast<std::size_t>(((a * 2) + b) * 2 + c)] = pc[c] * pa[c][a] * pb[c][b];
  Dist markov({2, 2, 2}, p);
  CHECK(conditional_mutual_information(markov, {0}, {1}, {2}) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // Trivial conditioning equals plain mutual information.
  Dist d4 = product(Dist({2, 2}, {0.4, 0.1, 0.2, 0.3}), Dist({1}, {1.0}));
  CHECK(conditional_mutual_information(d4, {0}, {1}, {2}) ==
        doctest::Approx(mutual_information(d4, {0}, {1})).epsilon(1e-12));

  // Chain rule on random three-coordinate joints.
  Tape env(TapeCategory::env, 13);
  for (int i = 0; i < 100; ++i) {
    Dist d = random_dist(env, {2, 2, 2});
    double lhs = mutual_information(d, {0, 1}, {2});
    double rhs =
        mutual_information(d, {0}, {2}) + conditional_mutual_information(d, {1}, {2}, {0});
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
  CHECK_THROWS(conditional_mutual_information(markov, {0}, {1}, {1}));
}

TEST_CASE("kl divergence and pinsker") {
  Dist p({2}, {0.3, 0.7});
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(Dist({2}, {1.0, 0.0}), Dist({2}, {0.5, 0.5})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(kl_divergence(Dist({2}, {1.0, 0.0}), Dist({2}, {0.0, 1.0}))));
  CHECK_THROWS(kl_divergence(p, Dist({3}, {0.2, 0.3, 0.5})));
  Tape env(TapeCategory::env, 14);
  for (int i = 0; i < 1000; ++i) {
    Dist a = random_dist(env, {2, 2});
    Dist b = random_dist(env, {2, 2});
    double l1 = l1_distance(a, b);
    CHECK(kl_divergence(a, b) >= l1 * l1 / (2.0 * std::log(2.0)) - 1e-12);
  }
}

TEST_CASE("total variation") {
  Dist p({2}, {1.0, 0.0}), q({2}, {0.5, 0.5});
  CHECK(total_variation(p, p) == doctest::Approx(0.0));
  CHECK(total_variation(p, Dist({2}, {0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(total_variation(p, q) == doctest::Approx(0.5));
}

TEST_CASE("entropy continuity slack") {
  CHECK(gamma_bound(7, 0.0) == doctest::Approx(0.0));
  CHECK(gamma_bound(2, 0.5) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(gamma_bound(4, 0.25) == doctest::Approx(1.3112781244591328).epsilon(1e-12));
  CHECK(gamma_bound(GammaArgs{4, 0.25}) == doctest::Approx(gamma_bound(4, 0.25)));
  CHECK_THROWS(gamma_bound(2, 1.5));
  CHECK_THROWS(gamma_bound(2, -0.1));
  for (double d = 0.0; d < 0.5; d += 0.02)
    CHECK(gamma_bound(3, d) < gamma_bound(3, d + 0.02));
  // Extension past 1 stays defined and conservative.
  CHECK(gamma_slack(2, 1.2) == doctest::Approx(1.2));
  CHECK(gamma_slack(2, 0.3) == doctest::Approx(gamma_bound(2, 0.3)));
}

TEST_CASE("conditional entropy continuity on random pairs") {
  Tape env(TapeCategory::env, 15);
  for (int i = 0; i < 1000; ++i) {
    Dist a = random_dist(env, {3, 2});
    Dist b = random_dist(env, {3, 2});
    double tv = total_variation(a, b);
    if (tv > 0.5) {
      double lam = 0.5 / tv;
      for (std::size_t k = 0; k < b.p.size(); ++k) b.p[k] = a.p[k] + lam * (b.p[k] - a.p[k]);
      tv = total_variation(a, b);
    }
    double dh = std::abs(conditional_entropy(a, {0}, {1}) - conditional_entropy(b, {0}, {1}));
    CHECK(dh <= gamma_slack(3, tv) + 1e-12);
  }
}
