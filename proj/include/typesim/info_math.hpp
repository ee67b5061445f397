#pragma once

#include <vector>

#include "typesim/dist.hpp"

namespace typesim {

// Exact finite-alphabet information measures, base 2, with the usual
// 0*log(0) := 0 convention. Coordinates are addressed by index.

double binary_entropy(double q);

// Arguments of the entropy continuity slack gamma(d, delta) = delta*log2(d) + h2(delta).
struct GammaArgs {
  int d;
  double delta;
};

double gamma_bound(int d, double delta);  // requires delta in [0, 1]
double gamma_bound(const GammaArgs& g);

// gamma with h2 extended by h2(delta > 1) := 0, for slack formulas whose
// delta arguments can exceed 1 at small n. Monotone and >= gamma on [0, 1].
double gamma_slack(int d, double delta);

double shannon_entropy(const Dist& d, const std::vector<int>& coords);
double conditional_entropy(const Dist& d, const std::vector<int>& target,
                           const std::vector<int>& given);
double mutual_information(const Dist& d, const std::vector<int>& a, const std::vector<int>& b);
double conditional_mutual_information(const Dist& d, const std::vector<int>& a,
                                      const std::vector<int>& b, const std::vector<int>& c);

// KL divergence in bits; +infinity when supp(p) is not contained in supp(q).
double kl_divergence(const Dist& p, const Dist& q);

// Total variation distance, (1/2) * l1.
double total_variation(const Dist& p, const Dist& q);

double l1_distance(const Dist& p, const Dist& q);

}  // namespace typesim
