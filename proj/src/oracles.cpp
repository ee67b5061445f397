#include "typesim/oracles.hpp"

#include <cmath>
#include <sstream>

#include "typesim/info_math.hpp"
#include "typesim/parallel.hpp"
#include "typesim/tape.hpp"
#include "typesim/types.hpp"
#include "typesim/util.hpp"

namespace typesim {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::vacuous_pass: return "vacuous-pass";
    case Verdict::fail: return "fail";
  }
  return "?";
}

BoundReport make_bound_report(std::string name, double bound, bool premise_ok,
                              const MCEstimate& measured, std::string witness) {
  BoundReport r;
  r.name = std::move(name);
  r.bound_value = bound;
  r.measured = measured;
  r.witness = std::move(witness);
  r.vacuous = !premise_ok || bound >= 1.0;
  if (!r.vacuous && measured.point - measured.ci95 > bound)
    r.verdict = Verdict::fail;
  else
    r.verdict = r.vacuous ? Verdict::vacuous_pass : Verdict::pass;
  return r;
}

double bound_eval_hoeffding(double u, double v, double q, double eps) {
  check_arg(q > 0 && u > 0 && v > 0 && u <= q && v <= q, "hoeffding parameter domain");
  check_arg(eps >= 0.0 && eps <= 1.0, "hoeffding epsilon domain");
  double mu = u * v / q;
  return std::exp(-mu * eps * eps / 2.0);
}

double bound_eval_chernoff(double n, double delta) {
  check_arg(n > 0 && delta >= 0.0, "chernoff parameter domain");
  return std::exp(-2.0 * n * delta * delta);
}

ConditionalTvResult mc_conditional_tv(
    const std::function<std::optional<std::uint64_t>(std::uint64_t)>& sample,
    const std::vector<double>& exact_reference, std::uint64_t trials, int threads) {
  check_arg(trials >= 1, "mc_conditional_tv needs trials >= 1");
  std::vector<std::uint64_t> results(trials);
  constexpr std::uint64_t kAbort = ~0ull;
  parallel_trials(trials, threads, [&](std::size_t i) {
    auto r = sample(static_cast<std::uint64_t>(i));
    results[i] = r ? *r : kAbort;
  });
  ConditionalTvResult out;
  out.trials = trials;
  out.histogram.assign(exact_reference.size(), 0.0);
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (results[i] == kAbort) continue;
    check_arg(results[i] < exact_reference.size(), "outcome index out of reference range");
    out.histogram[results[i]] += 1.0;
    ++out.successes;
  }
  check_state(out.successes > 0, "mc_conditional_tv: zero successful trials");
  double tv = 0.0;
  for (std::size_t c = 0; c < out.histogram.size(); ++c) {
    out.histogram[c] /= static_cast<double>(out.successes);
    tv += std::abs(out.histogram[c] - exact_reference[c]);
  }
  out.tv.point = 0.5 * tv;
  out.tv.trials = out.successes;
  out.tv.ci95 = 1.96 * std::sqrt(static_cast<double>(exact_reference.size()) /
                                 (4.0 * static_cast<double>(out.successes)));
  if (out.successes < trials) {
    double pf = 1.0 - static_cast<double>(out.successes) / static_cast<double>(trials);
    out.tv.ci95 += 1.96 * std::sqrt(pf * (1.0 - pf) / static_cast<double>(trials));
  }
  return out;
}

MCEstimate mc_event_rate(const std::function<bool(std::uint64_t)>& event, std::uint64_t trials,
                         int threads) {
  check_arg(trials >= 1, "mc_event_rate needs trials >= 1");
  std::vector<std::uint8_t> hits(trials, 0);
  parallel_trials(trials, threads, [&](std::size_t i) {
    hits[i] = event(static_cast<std::uint64_t>(i)) ? 1 : 0;
  });
  std::uint64_t c = 0;
  for (auto h : hits) c += h;
  MCEstimate e;
  e.trials = trials;
  e.point = static_cast<double>(c) / static_cast<double>(trials);
  e.ci95 = 1.96 * std::sqrt(e.point * (1.0 - e.point) / static_cast<double>(trials)) +
           1.0 / static_cast<double>(trials);
  return e;
}

namespace {

double log2n1(int n) { return std::log2(static_cast<double>(n) + 1.0); }

// Deterministic representative of a type class: symbols laid out cell by cell.
Seq representative(const JointType& t, int coord, int other_coord) {
  // coord selects which member of the pair to emit; counts are over (x, y).
  Seq s;
  s.arity = t.arities[static_cast<std::size_t>(coord)];
  for (int xx = 0; xx < t.arities[0]; ++xx)
    for (int yy = 0; yy < t.arities[1]; ++yy) {
      std::int64_t c = t.counts[static_cast<std::size_t>(xx) * t.arities[1] + yy];
      int sym = coord == 0 ? xx : yy;
      for (std::int64_t k = 0; k < c; ++k) s.sym.push_back(static_cast<std::uint8_t>(sym));
    }
  (void)other_coord;
  return s;
}

void add_violation(CardinalityReport& rep, const std::string& what) {
  if (rep.violations.size() < 64) rep.violations.push_back(what);
}

std::string describe_type(const JointType& t) {
  std::ostringstream os;
  os << "n=" << t.n << " counts=(";
  for (std::size_t i = 0; i < t.counts.size(); ++i) os << (i ? "," : "") << t.counts[i];
  os << ")";
  return os.str();
}

}  // namespace

CardinalityReport verify_cardinality_suite(const CardinalityConfig& cfg) {
  CardinalityReport rep;
  const double tol = 1e-9;
  for (int n = 1; n <= cfg.n_max; ++n) {
    auto types = enumerate_types(n, {cfg.x_arity, cfg.y_arity});
    std::vector<CardinalityReport> partial(types.size());
    parallel_trials(types.size(), cfg.threads, [&](std::size_t ti) {
      CardinalityReport& r = partial[ti];
      const JointType& t = types[ti];
      Dist td = t.to_dist();
      int cells = cfg.x_arity * cfg.y_arity;
      double h_joint = shannon_entropy(td, {0, 1});

      // Class cardinality vs 2^{nH} with the polynomial lower-bound factor.
      double lsz = std::log2(static_cast<double>(type_class_size(t)));
      ++r.checks;
      if (lsz > n * h_joint + tol ||
          lsz < n * h_joint - cells * log2n1(n) - tol)
        add_violation(r, "class cardinality bound: " + describe_type(t));

      JointType t_y = t.marginal({1});
      JointType t_x = t.marginal({0});
      double lsz_y = std::log2(static_cast<double>(type_class_size(t_y)));
      ++r.checks;
      if (lsz_y > n * shannon_entropy(td, {1}) + tol ||
          lsz_y < n * shannon_entropy(td, {1}) - cfg.y_arity * log2n1(n) - tol)
        add_violation(r, "marginal class cardinality bound: " + describe_type(t));

      // Partition identity |T_xy| = |T_y| * |T_{x|y}| on a representative y,
      // and independence of the conditional-class size from the chosen y.
      Seq y_rep = representative(t, 1, 0);
      auto cond = conditional_type_class(t, y_rep, cfg.x_arity);
      ++r.checks;
      if (type_class_size(t) != type_class_size(t_y) * cond.size())
        add_violation(r, "partition identity: " + describe_type(t));
      {
        Seq y_alt = y_rep;
        std::reverse(y_alt.sym.begin(), y_alt.sym.end());
        auto cond_alt = conditional_type_class(t, y_alt, cfg.x_arity);
        ++r.checks;
        if (cond_alt.size() != cond.size())
          add_violation(r, "conditional class size depends on y: " + describe_type(t));
      }

      // Conditional class cardinality bounds.
      double h_cond = conditional_entropy(td, {0}, {1});
      double lc = cond.empty() ? -1e30 : std::log2(static_cast<double>(cond.size()));
      ++r.checks;
      if (lc > n * h_cond + cells * log2n1(n) + tol ||
          lc < n * h_cond - cells * log2n1(n) - tol)
        add_violation(r, "conditional class cardinality bound: " + describe_type(t));

      for (double delta : cfg.delta_grid) {
        // Conditionally typical set around this type.
        TypicalSpec spec{td, delta};
        auto cts = cond_typical_set(spec, y_rep, cfg.x_arity);
        double g = gamma_slack(cfg.x_arity, delta);
        double lo = n * (h_cond - g) - cells * log2n1(n);
        double hi = n * (h_cond + g) + 2.0 * cells * log2n1(n);
        double lv = cts.empty() ? -1e30 : std::log2(static_cast<double>(cts.size()));
        ++r.checks;
        if (lv > hi + tol || lv < lo - tol)
          add_violation(r, "conditionally typical set cardinality: " + describe_type(t));

        // Joint typical set size by summing class sizes over the ball.
        double total = 0.0;
        for (const auto& t2 : types)
          if (l1_type_dist(t2, td) <= delta + 1e-12)
            total += static_cast<double>(type_class_size(t2));
        double gj = gamma_slack(cells - 1, delta);
        double ljo = n * (h_joint - gj) - cells * log2n1(n);
        double ljh = n * (h_joint + gj) + cells * log2n1(n);
        double ltv = std::log2(total);
        ++r.checks;
        if (ltv > ljh + tol || ltv < ljo - tol)
          add_violation(r, "joint typical set cardinality: " + describe_type(t));
      }

      for (const Channel& ch : cfg.channels) {
        if (ch.input_arities != std::vector<int>{cfg.x_arity}) continue;
        Dist md = append_channel(td, ch, {0});  // axes (X, Y, M)
        std::size_t m_space = 1;
        for (int k = 0; k < n; ++k) m_space *= static_cast<std::size_t>(ch.output_arity);
        for (double delta : cfg.delta_grid)
          for (double dp : cfg.delta_prime_grid) {
            ChannelTypicalSpec cspec{td, delta, &ch, dp};
            std::size_t cnt = 0;
            for (std::size_t mi = 0; mi < m_space; ++mi) {
              Seq m = seq_from_code(mi, ch.output_arity, static_cast<std::size_t>(n));
              if (channel_typical_member_receiver(m, y_rep, cspec, cfg.x_arity)) ++cnt;
            }
            double h_my = conditional_entropy(md, {2}, {1});
            double cap = n * (h_my + gamma_slack(ch.output_arity,
                                                 static_cast<double>(cfg.x_arity) * dp)) +
                         2.0 * ch.output_arity * cfg.y_arity * log2n1(n);
            ++r.checks;
            if (cnt > 0 && std::log2(static_cast<double>(cnt)) > cap + tol)
              add_violation(r, "receiver set cardinality: " + describe_type(t));
          }

        // Exact channel-output probability of the conditionally typical set,
        // against the exponential bound when it is informative.
        Seq x_rep = representative(t, 0, 1);
        for (double dp : cfg.delta_prime_grid) {
          ChannelTypicalSpec cspec{td, 0.0, &ch, dp};
          double prob = 0.0;
          for (std::size_t mi = 0; mi < m_space; ++mi) {
            Seq m = seq_from_code(mi, ch.output_arity, static_cast<std::size_t>(n));
            if (!channel_typical_member_triple(m, x_rep, y_rep, cspec)) continue;
            double p = 1.0;
            for (std::size_t k = 0; k < m.n(); ++k)
              p *= ch.prob_flat(static_cast<std::size_t>(x_rep.sym[k]), m.sym[k]);
            prob += p;
          }
          ++r.checks;
          if (prob < -tol || prob > 1.0 + tol)
            add_violation(r, "conditional set probability outside [0,1]: " + describe_type(t));
          double expo = -n * dp * dp / (2.0 * std::log(2.0)) +
                        2.0 * ch.output_arity * cfg.x_arity * cfg.y_arity * log2n1(n);
          double bound = std::exp2(expo);
          if (bound < 1.0) {
            ++r.checks;
            if (prob < 1.0 - bound - tol)
              add_violation(r, "conditional set probability bound: " + describe_type(t));
          }
        }
      }
    });
    for (auto& p : partial) {
      rep.checks += p.checks;
      for (auto& v : p.violations) add_violation(rep, v);
    }
  }
  return rep;
}

namespace {

// Independent re-implementation of the rate formulas, structured differently
// from rates.cpp on purpose: entropies by direct cell sums in long double.
long double dual_h_cond(const Dist& d, int t_coord, const std::vector<int>& given) {
  std::vector<int> all = given;
  all.push_back(t_coord);
  Dist joint = d.marginal(all);
  Dist cond = d.marginal(given);
  long double h = 0.0L;
  std::size_t t_ar = static_cast<std::size_t>(joint.arities.back());
  for (std::size_t g = 0; g < cond.p.size(); ++g) {
    for (std::size_t m = 0; m < t_ar; ++m) {
      long double pj = joint.p[g * t_ar + m];
      if (pj <= 0.0L) continue;
      h -= pj * (std::log(static_cast<double>(pj / cond.p[g])) / std::log(2.0));
    }
  }
  return h;
}

long double dual_gamma(int d, long double delta) {
  long double h = 0.0L;
  if (delta > 0.0L && delta < 1.0L)
    h = -(delta * std::log2(static_cast<double>(delta)) +
          (1.0L - delta) * std::log2(static_cast<double>(1.0L - delta)));
  return delta * std::log2(static_cast<double>(d)) + h;
}

}  // namespace

DualCheckReport dual_formula_check(std::uint64_t seed, int instances) {
  DualCheckReport rep;
  Tape env(TapeCategory::env, seed);
  for (int inst = 0; inst < instances; ++inst) {
    int x_ar = 2 + static_cast<int>(env.draw_uniform(2));
    int y_ar = 2 + static_cast<int>(env.draw_uniform(2));
    int m_ar = 2 + static_cast<int>(env.draw_uniform(2));
    ProtocolParams P;
    P.n = 4 + static_cast<int>(env.draw_uniform(29));
    P.delta = env.draw_unit() * 0.5;
    P.delta_prime = env.draw_unit() * 0.5;
    P.delta_double_prime = env.draw_unit() * 0.5;
    P.delta_s = 0.1 + env.draw_unit() * 0.4;
    // Random joint distribution and channel.
    std::vector<double> w(static_cast<std::size_t>(x_ar) * y_ar);
    double sum = 0.0;
    for (auto& v : w) {
      v = env.draw_unit() + 1e-3;
      sum += v;
    }
    for (auto& v : w) v /= sum;
    Dist t_xy({x_ar, y_ar}, std::move(w));
    std::vector<double> tab(static_cast<std::size_t>(x_ar) * m_ar);
    for (int xx = 0; xx < x_ar; ++xx) {
      double rs = 0.0;
      for (int mm = 0; mm < m_ar; ++mm) {
        tab[static_cast<std::size_t>(xx) * m_ar + mm] = env.draw_unit() + 1e-3;
        rs += tab[static_cast<std::size_t>(xx) * m_ar + mm];
      }
      for (int mm = 0; mm < m_ar; ++mm) tab[static_cast<std::size_t>(xx) * m_ar + mm] /= rs;
    }
    Channel ch({x_ar}, m_ar, std::move(tab));

    Dist md = append_channel(t_xy.with_trivial_axis(), ch.reshape_inputs({x_ar, 1}), {0, 2});
    int j = 1 + static_cast<int>(env.draw_uniform(3));
    RateBounds got = rate_bounds(P, t_xy, md, m_ar, x_ar, y_ar, j, m_ar,
                                 static_cast<std::int64_t>(std::pow(m_ar, j)));

    // Second route.
    long double n = P.n;
    long double l2n1 = std::log2(static_cast<double>(P.n + 1));
    long double l2n = std::log2(static_cast<double>(P.n));
    Dist q = append_channel(t_xy, ch, {0});  // axes (X, Y, M)
    long double h_m_xy = dual_h_cond(q, 2, {0, 1});
    long double h_m_y = dual_h_cond(q, 2, {1});
    long double h_x_y = dual_h_cond(t_xy, 0, {1});
    long double ddd = static_cast<long double>(P.delta_prime) * P.delta_prime /
                          (2.0L * std::log(2.0L)) -
                      2.0L / n * m_ar * x_ar * y_ar * l2n1;
    long double dmax = std::max({(long double)P.delta, (long double)P.delta_prime,
                                 (long double)P.delta_double_prime});
    long double dmaxj = std::max({(long double)P.delta + (j - 1) * (long double)P.delta_prime,
                                  (long double)P.delta_prime,
                                  (long double)P.delta_double_prime});
    long double lle = std::log2(std::log2(std::exp(1.0)));
    long double want_Csw = h_x_y + dual_gamma(x_ar, P.delta) + 2.0L / n * x_ar * y_ar * l2n1 +
                           P.delta + 1.0L / n;
    long double want_R = h_m_xy - dual_gamma(m_ar, P.delta) - dual_gamma(m_ar, P.delta_prime) -
                         1.0L / n * m_ar * x_ar * l2n1 + lle / n - 1.0L / n - l2n / n;
    long double want_C = (h_m_y - h_m_xy) + dual_gamma(m_ar, (long double)x_ar * P.delta_prime) +
                         dual_gamma(m_ar, P.delta) + dual_gamma(m_ar, P.delta_prime) +
                         3.0L / n * m_ar * x_ar * y_ar * l2n1 + P.delta + 1.0L / n + l2n / n;
    long double want_e1 = 2.0L * dual_gamma(x_ar, P.delta) + 2.0L / n * x_ar * y_ar * l2n1 +
                          l2n / n + 3.0L * P.delta + P.o.slack_inv_n / n;
    long double want_e2 = 5.0L * dual_gamma(m_ar, (long double)x_ar * y_ar * dmax) +
                          4.0L / n * m_ar * x_ar * y_ar * l2n1 + 2.0L * l2n / n + 3.0L * dmax +
                          P.o.slack_inv_n / n;
    long double mprod = std::pow(m_ar, j);
    long double want_e3 = 5.0L * j * dual_gamma(m_ar, (long double)x_ar * y_ar * dmaxj) +
                          2.0L * j * l2n / n + 4.0L * j / n * mprod * x_ar * y_ar * l2n1 +
                          3.0L * j * dmaxj + P.o.slack_inv_n * j / n;

    auto upd = [&](const char* what, double a, long double b) {
      double d = std::abs(a - static_cast<double>(b));
      if (d > rep.max_abs_diff) {
        rep.max_abs_diff = d;
        std::ostringstream os;
        os << what << " inst=" << inst << " got=" << a << " want=" << static_cast<double>(b);
        rep.worst = os.str();
      }
    };
    upd("C_sw", got.C_sw, want_Csw);
    upd("R", got.R, want_R);
    upd("C", got.C, want_C);
    upd("eta1", got.eta1, want_e1);
    upd("eta2", got.eta2, want_e2);
    upd("eta3", got.eta3, want_e3);
    upd("ddd", got.ddd, ddd);
    ++rep.instances;
  }
  return rep;
}

}  // namespace typesim
