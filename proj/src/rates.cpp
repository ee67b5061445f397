#include "typesim/rates.hpp"

#include <algorithm>
#include <cmath>

#include "typesim/info_math.hpp"
#include "typesim/util.hpp"

namespace typesim {

namespace {
const double kLog2E = std::log2(std::exp(1.0));
const double kLogLogE = std::log2(std::log2(std::exp(1.0)));

double log2n1(int n) { return std::log2(static_cast<double>(n) + 1.0); }
}  // namespace

int ProtocolParams::samples() const {
  if (m_samples > 0) return m_samples;
  return static_cast<int>(std::ceil(static_cast<double>(n) * delta_s));
}

void ProtocolParams::validate() const {
  check_arg(n >= 1, "n must be >= 1");
  check_arg(delta >= 0 && delta_prime >= 0 && delta_double_prime >= 0 && delta_s >= 0,
            "deltas must be non-negative");
  check_arg(samples() <= n, "sample count must be <= n");
}

DerivedDeltas derived_deltas(const ProtocolParams& p, int m_ar, int x_ar, int y_ar) {
  DerivedDeltas d;
  d.ddd = p.delta_prime * p.delta_prime / (2.0 * std::log(2.0)) -
          2.0 / p.n * static_cast<double>(m_ar) * x_ar * y_ar * log2n1(p.n);
  d.dmin = std::min({p.delta, d.ddd, p.delta_double_prime});
  d.dmax = std::max({p.delta, p.delta_prime, p.delta_double_prime});
  d.premise = d.ddd > 0.0;
  return d;
}

double delta_max_j(const ProtocolParams& p, int j) {
  return std::max({p.delta + (j - 1) * p.delta_prime, p.delta_prime, p.delta_double_prime});
}

double eta1(const ProtocolParams& p, int x_ar, int y_ar) {
  double n = p.n;
  return 2.0 * gamma_slack(x_ar, p.delta) + 2.0 / n * x_ar * y_ar * log2n1(p.n) +
         std::log2(n) / n + 3.0 * p.delta + p.o.slack_inv_n / n;
}

double eta2(const ProtocolParams& p, int m_ar, int x_ar, int y_ar, double dmax) {
  double n = p.n;
  return 5.0 * gamma_slack(m_ar, static_cast<double>(x_ar) * y_ar * dmax) +
         4.0 / n * m_ar * x_ar * y_ar * log2n1(p.n) + 2.0 * std::log2(n) / n + 3.0 * dmax +
         p.o.slack_inv_n / n;
}

double eta3(const ProtocolParams& p, int j, int m_max_ar, std::int64_t m_prod_ar, int x_ar,
            int y_ar) {
  double n = p.n;
  double dmj = delta_max_j(p, j);
  return 5.0 * j * gamma_slack(m_max_ar, static_cast<double>(x_ar) * y_ar * dmj) +
         2.0 * j * std::log2(n) / n +
         4.0 * j / n * static_cast<double>(m_prod_ar) * x_ar * y_ar * log2n1(p.n) +
         3.0 * j * dmj + p.o.slack_inv_n * j / n;
}

double sw_rate_C(const ProtocolParams& p, const Dist& center_xy, int x_ar, int y_ar) {
  double h = conditional_entropy(center_xy, {0}, {1});
  return h + gamma_slack(x_ar, p.delta) + 2.0 / p.n * x_ar * y_ar * log2n1(p.n) + p.delta +
         1.0 / p.n;
}

double rst_H_m_given_xy(const Dist& md) {
  return conditional_entropy(md, {3}, {0, 1, 2});
}

double rst_I_m_x_given_y(const Dist& md) {
  return conditional_entropy(md, {3}, {1, 2}) - conditional_entropy(md, {3}, {0, 1, 2});
}

double rst_rate_R(const ProtocolParams& p, const Dist& md, int m_ar, int x_ar) {
  double n = p.n;
  return rst_H_m_given_xy(md) - gamma_slack(m_ar, p.delta) - gamma_slack(m_ar, p.delta_prime) -
         1.0 / n * m_ar * x_ar * log2n1(p.n) + kLogLogE / n - 1.0 / n - std::log2(n) / n;
}

double rst_rate_C(const ProtocolParams& p, const Dist& md, int m_ar, int x_ar, int y_ar,
                  double delta_round) {
  double n = p.n;
  return rst_I_m_x_given_y(md) + gamma_slack(m_ar, static_cast<double>(x_ar) * p.delta_prime) +
         gamma_slack(m_ar, delta_round) + gamma_slack(m_ar, p.delta_prime) +
         3.0 / n * m_ar * x_ar * y_ar * log2n1(p.n) + delta_round + 1.0 / n + std::log2(n) / n;
}

namespace {
int clamp_seed_bits(double v) {
  if (!(v > 1.0)) return 1;
  check_arg(v <= 4096.0, "seed size out of supported range");
  return static_cast<int>(std::ceil(v));
}
}  // namespace

int seed_bits_sw1(const ProtocolParams& p, int x_ar, int y_ar) {
  double lll = std::max(0.0, std::log2(std::max(1.0, std::log2(static_cast<double>(x_ar) * y_ar))));
  return clamp_seed_bits(std::log2(static_cast<double>(p.n)) + lll + 2.0 * p.n * p.delta +
                         p.o.slack_one);
}

int seed_bits_sw2(const ProtocolParams& p, int x_ar, int y_ar) {
  double dprime = 2.0 * p.delta_s * p.delta * p.delta * kLog2E +
                  std::log2(static_cast<double>(x_ar) * y_ar) / p.n + 3.0 / p.n;
  double lll = std::max(0.0, std::log2(std::max(1.0, std::log2(static_cast<double>(x_ar) * y_ar))));
  return clamp_seed_bits(std::log2(static_cast<double>(p.n)) + lll + 2.0 * p.n * dprime +
                         p.o.slack_one);
}

int seed_bits_sw3(const ProtocolParams& p, int x_ar, int y_ar) {
  double dprime = p.delta * p.delta / (2.0 * std::log(2.0)) -
                  2.0 / p.n * y_ar * x_ar * log2n1(p.n) - 2.0 / p.n;
  double lll = std::max(0.0, std::log2(std::max(1.0, std::log2(static_cast<double>(x_ar) * y_ar))));
  return clamp_seed_bits(std::log2(static_cast<double>(p.n)) + lll +
                         2.0 * p.n * std::max(0.0, dprime) + p.o.slack_one);
}

int seed_bits_rst(const ProtocolParams& p, int m_ar, int x_ar, int y_ar) {
  DerivedDeltas d = derived_deltas(p, m_ar, x_ar, y_ar);
  return clamp_seed_bits(std::log2(static_cast<double>(p.n)) + 2.0 * p.n * d.dmin * d.dmin +
                         p.o.slack_one);
}

double estimate_failure_bound(int m_samples, double delta, int x_ar, int y_ar) {
  double expo = -2.0 * m_samples * delta * delta * kLog2E +
                std::log2(static_cast<double>(x_ar) * y_ar) + 1.0;
  return std::exp2(expo);
}

double cap_round1_estimation(const ProtocolParams& p, int y_ar, double seed_rate_term) {
  double n = p.n;
  return n * (p.delta_s * std::log2(static_cast<double>(y_ar)) + std::log2(n) / n +
              seed_rate_term + p.o.slack_inv_n / n);
}

double cap_sw2_round2(const ProtocolParams& p, int x_ar) {
  return p.n * (p.delta_s + 1.0) * std::log2(static_cast<double>(x_ar));
}

double cap_rst2_round2(const ProtocolParams& p, int x_ar, int m_ar) {
  return p.n * (p.delta_s * std::log2(static_cast<double>(x_ar)) +
                std::log2(static_cast<double>(m_ar)));
}

double cap_int_round_i(const ProtocolParams& p, int m_prev_ar) {
  return p.n * std::log2(static_cast<double>(m_prev_ar));
}

double cap_int3_round1(const ProtocolParams& p, int x_ar, int m1_ar, double dmin) {
  double n = p.n;
  return n * (p.delta_s * std::log2(static_cast<double>(x_ar)) +
              std::log2(static_cast<double>(m1_ar)) + std::log2(n) / n + 2.0 * dmin * dmin +
              p.o.slack_inv_n / n);
}

double cap_int3_round2(const ProtocolParams& p, int y_ar, int m2_ar) {
  return p.n * (p.delta_s * std::log2(static_cast<double>(y_ar)) +
                std::log2(static_cast<double>(m2_ar)));
}

RateBounds rate_bounds(const ProtocolParams& p, const Dist& center_xy, const Dist& md, int m_ar,
                       int x_ar, int y_ar, int j, int m_max_ar, std::int64_t m_prod_ar) {
  RateBounds r;
  DerivedDeltas d = derived_deltas(p, m_ar, x_ar, y_ar);
  r.ddd = d.ddd;
  r.dmin = d.dmin;
  r.dmax = d.dmax;
  r.C_sw = sw_rate_C(p, center_xy, x_ar, y_ar);
  r.R = rst_rate_R(p, md, m_ar, x_ar);
  r.C = rst_rate_C(p, md, m_ar, x_ar, y_ar, p.delta);
  r.eta1 = eta1(p, x_ar, y_ar);
  r.eta2 = eta2(p, m_ar, x_ar, y_ar, d.dmax);
  if (m_max_ar > 0 && m_prod_ar > 0) r.eta3 = eta3(p, j, m_max_ar, m_prod_ar, x_ar, y_ar);
  return r;
}

}  // namespace typesim
