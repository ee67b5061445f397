#include "typesim/info_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "typesim/util.hpp"

namespace typesim {

namespace {

double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    for (int y : b) check_arg(x != y, "coordinate sets must be disjoint");
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

}  // namespace

double binary_entropy(double q) {
  check_arg(q >= 0.0 && q <= 1.0, "binary_entropy argument outside [0,1]");
  return -plog2p(q) - plog2p(1.0 - q);
}

double gamma_bound(int d, double delta) {
  check_arg(d >= 1, "gamma_bound needs d >= 1");
  check_arg(delta >= 0.0 && delta <= 1.0, "gamma_bound delta outside [0,1]");
  return delta * std::log2(static_cast<double>(d)) + binary_entropy(delta);
}

double gamma_bound(const GammaArgs& g) { return gamma_bound(g.d, g.delta); }

double gamma_slack(int d, double delta) {
  check_arg(d >= 1 && delta >= 0.0, "gamma_slack domain");
  double h = delta <= 1.0 ? binary_entropy(delta) : 0.0;
  return delta * std::log2(static_cast<double>(d)) + h;
}

double shannon_entropy(const Dist& d, const std::vector<int>& coords) {
  check_arg(!coords.empty(), "shannon_entropy needs a non-empty coordinate set");
  Dist m = d.marginal(coords);
  double h = 0.0;
  for (double v : m.p) h -= plog2p(v);
  return h;
}

double conditional_entropy(const Dist& d, const std::vector<int>& target,
                           const std::vector<int>& given) {
  check_disjoint(target, given);
  if (given.empty()) return shannon_entropy(d, target);
  return shannon_entropy(d, concat(target, given)) - shannon_entropy(d, given);
}

double mutual_information(const Dist& d, const std::vector<int>& a, const std::vector<int>& b) {
  check_disjoint(a, b);
  return shannon_entropy(d, a) + shannon_entropy(d, b) - shannon_entropy(d, concat(a, b));
}

double conditional_mutual_information(const Dist& d, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c) {
  check_disjoint(a, b);
  check_disjoint(a, c);
  check_disjoint(b, c);
  return conditional_entropy(d, a, c) - conditional_entropy(d, a, concat(b, c));
}

double kl_divergence(const Dist& p, const Dist& q) {
  check_arg(p.arities == q.arities, "kl_divergence alphabet mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    if (p.p[i] <= 0.0) continue;
    if (q.p[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p.p[i] * std::log2(p.p[i] / q.p[i]);
  }
  return s;
}

double l1_distance(const Dist& p, const Dist& q) {
  check_arg(p.arities == q.arities, "l1_distance alphabet mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) s += std::abs(p.p[i] - q.p[i]);
  return s;
}

double total_variation(const Dist& p, const Dist& q) { return 0.5 * l1_distance(p, q); }

}  // namespace typesim
