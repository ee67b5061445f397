#pragma once

#include <cstdint>

#include "typesim/dist.hpp"

namespace typesim {

// Explicit constants substituted for the O(1/n) and O(1) slack terms; the
// formulas only get looser as these grow. Recorded in every report.
struct OConstants {
  double slack_inv_n = 4.0;  // O(1/n) -> slack_inv_n / n, O(j/n) -> slack_inv_n * j / n
  double slack_one = 4.0;    // O(1) -> slack_one (seed-size formulas)
};

struct ProtocolParams {
  int n = 8;
  int m_samples = 0;  // 0 -> ceil(n * delta_s)
  double delta = 0.1;
  double delta_prime = 0.1;
  double delta_double_prime = 0.1;
  double delta_s = 0.2;
  OConstants o;

  int samples() const;
  void validate() const;
};

struct DerivedDeltas {
  double ddd;    // delta''' = delta'^2 / (2 ln 2) - (2/n)|M||X||Y| log2(n+1)
  double dmin;   // min(delta, delta''', delta'')
  double dmax;   // max(delta, delta', delta'')
  bool premise;  // true when delta''' > 0, i.e. the failure-rate bounds apply
};

DerivedDeltas derived_deltas(const ProtocolParams& p, int m_ar, int x_ar, int y_ar);

double delta_max_j(const ProtocolParams& p, int j);

// Slack terms.
double eta1(const ProtocolParams& p, int x_ar, int y_ar);
double eta2(const ProtocolParams& p, int m_ar, int x_ar, int y_ar, double dmax);
double eta3(const ProtocolParams& p, int j, int m_max_ar, std::int64_t m_prod_ar, int x_ar,
            int y_ar);

// Rates. Entropies are computed on the supplied joint distributions:
//  - sw: center on (X, Y);
//  - rst: md on axes (S, R, H, M) -- base inputs, history, appended message.
double sw_rate_C(const ProtocolParams& p, const Dist& center_xy, int x_ar, int y_ar);
double rst_rate_R(const ProtocolParams& p, const Dist& md, int m_ar, int x_ar);
double rst_rate_C(const ProtocolParams& p, const Dist& md, int m_ar, int x_ar, int y_ar,
                  double delta_round);

// Conditional entropies of an (S, R, H, M) joint used by ledger checks.
double rst_H_m_given_xy(const Dist& md);
double rst_I_m_x_given_y(const Dist& md);

// Derandomization seed sizes in bits (clamped at >= 1).
int seed_bits_sw1(const ProtocolParams& p, int x_ar, int y_ar);
int seed_bits_sw2(const ProtocolParams& p, int x_ar, int y_ar);
int seed_bits_sw3(const ProtocolParams& p, int x_ar, int y_ar);
int seed_bits_rst(const ProtocolParams& p, int m_ar, int x_ar, int y_ar);

// Estimation failure bound: probability that some cell of the sampled
// estimate deviates from the true type by more than delta.
double estimate_failure_bound(int m_samples, double delta, int x_ar, int y_ar);

// Fixed/maximum per-round message sizes from the two-round and interactive
// statements (real-valued; ledger checks compare transmitted bits against
// them).
double cap_round1_estimation(const ProtocolParams& p, int y_ar, double seed_rate_term);
double cap_sw2_round2(const ProtocolParams& p, int x_ar);
double cap_rst2_round2(const ProtocolParams& p, int x_ar, int m_ar);
double cap_int_round_i(const ProtocolParams& p, int m_prev_ar);
double cap_int3_round1(const ProtocolParams& p, int x_ar, int m1_ar, double dmin);
double cap_int3_round2(const ProtocolParams& p, int y_ar, int m2_ar);

// Aggregate snapshot for reports and the dual-implementation check.
struct RateBounds {
  double C_sw = 0, R = 0, C = 0;
  double eta1 = 0, eta2 = 0, eta3 = 0;
  double ddd = 0, dmin = 0, dmax = 0;
};

RateBounds rate_bounds(const ProtocolParams& p, const Dist& center_xy, const Dist& md, int m_ar,
                       int x_ar, int y_ar, int j = 1, int m_max_ar = 0, std::int64_t m_prod_ar = 0);

}  // namespace typesim
