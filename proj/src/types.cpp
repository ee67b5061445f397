#include "typesim/types.hpp"

#include <cmath>

namespace typesim {

namespace {

std::uint64_t mul_div_checked(std::uint64_t acc, std::uint64_t num, std::uint64_t den) {
  unsigned __int128 v = static_cast<unsigned __int128>(acc) * num;
  v /= den;
  check_state(v <= static_cast<unsigned __int128>(~0ull), "type class size overflows 64 bits");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = mul_div_checked(r, n - k + i, i);
  return r;
}

void enumerate_compositions(std::int64_t n, std::size_t cells, std::vector<std::int64_t>& cur,
                            std::size_t cell, std::vector<std::vector<std::int64_t>>& out) {
  if (cell + 1 == cells) {
    cur[cell] = n;
    out.push_back(cur);
    return;
  }
  for (std::int64_t v = n; v >= 0; --v) {
    cur[cell] = v;
    enumerate_compositions(n - v, cells, cur, cell + 1, out);
  }
}

void gen_class_rec(const std::vector<int>& arities, std::vector<std::int64_t>& remaining,
                   Seq& work, std::size_t pos, std::vector<std::uint32_t>& out) {
  if (pos == work.n()) {
    out.push_back(static_cast<std::uint32_t>(seq_code(work)));
    return;
  }
  for (int s = 0; s < work.arity; ++s) {
    if (remaining[static_cast<std::size_t>(s)] == 0) continue;
    --remaining[static_cast<std::size_t>(s)];
    work.sym[pos] = static_cast<std::uint8_t>(s);
    gen_class_rec(arities, remaining, work, pos + 1, out);
    ++remaining[static_cast<std::size_t>(s)];
  }
}

constexpr double kTieTol = 1e-12;

// Depth-first over all ways to split each fixed cell's count across `bins`;
// calls check(tau) with tau laid out cell-major: tau[cell * bins + bin].
template <class Check>
bool split_cell(const std::vector<std::int64_t>& cnt, int bins, std::vector<std::int64_t>& tau,
                std::size_t cell, Check& check) {
  if (cell == cnt.size()) return check(tau);
  // Compositions of cnt[cell] into `bins` parts, first part descending.
  struct Comp {
    std::vector<std::int64_t>& tau;
    const std::vector<std::int64_t>& cnt;
    int bins;
    std::size_t cell;
    Check& check;
    bool rec(int bin, std::int64_t rem) {
      std::size_t base = cell * static_cast<std::size_t>(bins);
      if (bin + 1 == bins) {
        tau[base + static_cast<std::size_t>(bin)] = rem;
        return split_cell(cnt, bins, tau, cell + 1, check);
      }
      for (std::int64_t v = rem; v >= 0; --v) {
        tau[base + static_cast<std::size_t>(bin)] = v;
        if (rec(bin + 1, rem - v)) return true;
      }
      return false;
    }
  } comp{tau, cnt, bins, cell, check};
  return comp.rec(0, cnt[cell]);
}

}  // namespace

Dist JointType::to_dist() const {
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return Dist(arities, std::move(p));
}

JointType JointType::marginal(const std::vector<int>& coords) const {
  Dist shape;  // reuse Dist flattening to walk cells
  shape.arities = arities;
  shape.p.assign(counts.size(), 0.0);
  std::vector<int> out_ar;
  for (int c : coords) {
    check_arg(c >= 0 && c < static_cast<int>(arities.size()), "marginal coordinate out of range");
    out_ar.push_back(arities[static_cast<std::size_t>(c)]);
  }
  JointType r;
  r.n = n;
  r.arities = out_ar;
  r.counts.assign(product_of_arities(out_ar), 0);
  std::vector<int> idx;
  for (std::size_t f = 0; f < counts.size(); ++f) {
    shape.unflatten(f, idx);
    std::size_t g = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
      g = g * static_cast<std::size_t>(out_ar[i]) +
          static_cast<std::size_t>(idx[static_cast<std::size_t>(coords[i])]);
    r.counts[g] += counts[f];
  }
  return r;
}

JointType empirical_type(const Seq& s) {
  check_arg(s.n() >= 1, "empirical_type needs n >= 1");
  JointType t;
  t.n = static_cast<std::int64_t>(s.n());
  t.arities = {s.arity};
  t.counts.assign(static_cast<std::size_t>(s.arity), 0);
  for (auto v : s.sym) ++t.counts[v];
  return t;
}

JointType joint_empirical_type(const std::vector<const Seq*>& seqs) {
  check_arg(!seqs.empty(), "joint_empirical_type needs at least one sequence");
  std::size_t n = seqs[0]->n();
  for (const Seq* s : seqs) check_arg(s->n() == n, "joint_empirical_type length mismatch");
  Seq flat = flatten_seqs(seqs);
  JointType t = empirical_type(flat);
  t.arities.clear();
  for (const Seq* s : seqs) t.arities.push_back(s->arity);
  return t;
}

std::vector<JointType> enumerate_types(std::int64_t n, const std::vector<int>& arities) {
  check_arg(n >= 1, "enumerate_types needs n >= 1");
  std::size_t cells = product_of_arities(arities);
  std::uint64_t total = count_types(n, cells);
  check_arg(total <= kEnumCap, "type enumeration exceeds cap");
  std::vector<std::vector<std::int64_t>> comps;
  std::vector<std::int64_t> cur(cells, 0);
  enumerate_compositions(n, cells, cur, 0, comps);
  std::vector<JointType> out;
  out.reserve(comps.size());
  for (auto& c : comps) {
    JointType t;
    t.n = n;
    t.arities = arities;
    t.counts = std::move(c);
    out.push_back(std::move(t));
  }
  return out;
}

std::uint64_t count_types(std::int64_t n, std::size_t cells) {
  return binomial_exact(static_cast<std::uint64_t>(n) + cells - 1, cells - 1);
}

std::uint64_t type_class_size(const JointType& t) {
  std::uint64_t size = 1;
  std::uint64_t rem = static_cast<std::uint64_t>(t.n);
  for (std::int64_t c : t.counts) {
    check_arg(c >= 0, "negative count");
    std::uint64_t b = binomial_exact(rem, static_cast<std::uint64_t>(c));
    unsigned __int128 v = static_cast<unsigned __int128>(size) * b;
    check_state(v <= static_cast<unsigned __int128>(~0ull), "type class size overflows 64 bits");
    size = static_cast<std::uint64_t>(v);
    rem -= static_cast<std::uint64_t>(c);
  }
  check_arg(rem == 0, "counts do not sum to n");
  return size;
}

double log2_type_class_size(const JointType& t) {
  double v = std::lgamma(static_cast<double>(t.n) + 1.0);
  for (std::int64_t c : t.counts) v -= std::lgamma(static_cast<double>(c) + 1.0);
  return v / std::log(2.0);
}

std::vector<std::uint32_t> enumerate_type_class(const JointType& t) {
  std::uint64_t size = type_class_size(t);
  check_arg(size <= kEnumCap, "type class exceeds enumeration cap");
  int arity = static_cast<int>(product_of_arities(t.arities));
  check_arg(arity <= 255, "flattened alphabet too large");
  double codes = std::pow(static_cast<double>(arity), static_cast<double>(t.n));
  check_arg(codes <= static_cast<double>(1ull << 31), "sequence codes exceed 32-bit range");
  Seq work;
  work.arity = arity;
  work.sym.assign(static_cast<std::size_t>(t.n), 0);
  std::vector<std::int64_t> remaining = t.counts;
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(size));
  gen_class_rec(t.arities, remaining, work, 0, out);
  return out;
}

double l1_type_dist(const JointType& t, const Dist& center) {
  check_arg(t.cells() == center.cells(), "l1_type_dist cell mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < t.cells(); ++i)
    s += std::abs(static_cast<double>(t.counts[i]) / static_cast<double>(t.n) - center.p[i]);
  return s;
}

double l1_type_dist(const JointType& a, const JointType& b) {
  check_arg(a.cells() == b.cells(), "l1_type_dist cell mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.cells(); ++i)
    s += std::abs(static_cast<double>(a.counts[i]) / static_cast<double>(a.n) -
                  static_cast<double>(b.counts[i]) / static_cast<double>(b.n));
  return s;
}

bool typical_member(const JointType& observed, const TypicalSpec& spec) {
  return l1_type_dist(observed, spec.center) <= spec.delta + kTieTol;
}

bool typical_member(const Seq& a, const Seq& b, const TypicalSpec& spec) {
  return typical_member(joint_empirical_type(a, b), spec);
}

std::vector<std::uint32_t> conditional_type_class(const JointType& t, const Seq& y, int x_arity) {
  check_arg(t.arities.size() == 2, "conditional_type_class expects a two-coordinate type");
  check_arg(t.arities[0] == x_arity && t.arities[1] == y.arity,
            "conditional_type_class arity mismatch");
  JointType ty = empirical_type(y);
  JointType marg = t.marginal({1});
  check_arg(ty.counts == marg.counts, "y is not of the type's second marginal");
  double universe = std::pow(static_cast<double>(x_arity), static_cast<double>(y.n()));
  check_arg(universe <= static_cast<double>(kEnumCap), "conditional class exceeds cap");
  std::vector<std::uint32_t> out;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < y.n(); ++i) cells *= static_cast<std::size_t>(x_arity);
  for (std::size_t code = 0; code < cells; ++code) {
    Seq x = seq_from_code(code, x_arity, y.n());
    if (joint_empirical_type(x, y).counts == t.counts) out.push_back(static_cast<std::uint32_t>(code));
  }
  return out;
}

bool exists_typical_partner(const Seq& x, const TypicalSpec& spec, int y_arity) {
  check_arg(spec.center.coords() == 2 && spec.center.arities[0] == x.arity &&
                spec.center.arities[1] == y_arity,
            "exists_typical_partner center shape mismatch");
  JointType tx = empirical_type(x);
  double n = static_cast<double>(x.n());
  auto check = [&](const std::vector<std::int64_t>& tau) {
    double d = 0.0;
    for (std::size_t c = 0; c < tau.size(); ++c)
      d += std::abs(static_cast<double>(tau[c]) / n - spec.center.p[c]);
    return d <= spec.delta + kTieTol;
  };
  std::vector<std::int64_t> tau(tx.cells() * static_cast<std::size_t>(y_arity), 0);
  return split_cell(tx.counts, y_arity, tau, 0, check);
}

std::vector<std::uint32_t> cond_typical_set(const TypicalSpec& spec, const Seq& y, int x_arity) {
  double universe = std::pow(static_cast<double>(x_arity), static_cast<double>(y.n()));
  check_arg(universe <= static_cast<double>(kEnumCap), "conditional typical set exceeds cap");
  std::vector<std::uint32_t> out;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < y.n(); ++i) cells *= static_cast<std::size_t>(x_arity);
  for (std::size_t code = 0; code < cells; ++code) {
    Seq x = seq_from_code(code, x_arity, y.n());
    if (typical_member(x, y, spec)) out.push_back(static_cast<std::uint32_t>(code));
  }
  return out;
}

bool channel_typical_member_triple(const Seq& m, const Seq& x, const Seq& y,
                                   const ChannelTypicalSpec& spec) {
  JointType txy = joint_empirical_type(x, y);
  if (l1_type_dist(txy, spec.center_xy) > spec.delta + kTieTol) return false;
  JointType tmxy = joint_empirical_type({&m, &x, &y});
  // || t_{m,x,y} - p * t_{x,y} ||_1
  double s = 0.0;
  std::size_t mi = 0;
  for (int mm = 0; mm < m.arity; ++mm)
    for (int xx = 0; xx < x.arity; ++xx)
      for (int yy = 0; yy < y.arity; ++yy, ++mi) {
        double obs = static_cast<double>(tmxy.counts[mi]) / static_cast<double>(tmxy.n);
        double ref = static_cast<double>(txy.counts[static_cast<std::size_t>(xx) *
                                                        static_cast<std::size_t>(y.arity) +
                                                    static_cast<std::size_t>(yy)]) /
                     static_cast<double>(txy.n) * spec.channel->prob_flat(static_cast<std::size_t>(xx), mm);
        s += std::abs(obs - ref);
      }
  return s <= spec.delta_prime + kTieTol;
}

namespace {

// Shared core of the projected membership tests. Axis roles:
//   sender: known = (m, s, h) counts, split across r bins;
//   receiver: known = (m, r, h) counts, split across s bins.
struct ProjectedCheck {
  int m_ar, s_ar, r_ar, h_ar;
  const Dist* center;  // axes [S, R, H]
  const Channel* ch;   // p(m | s, h)
  double delta, delta_prime;
  double n;
  bool sender_side;

  // tau: cell-major over (m, a, h) x bins where a is the known base.
  bool operator()(const std::vector<std::int64_t>& tau) const {
    int a_ar = sender_side ? s_ar : r_ar;
    int bins = sender_side ? r_ar : s_ar;
    // marg(s, h, r): summed over m.
    std::vector<double> marg(static_cast<std::size_t>(s_ar) * r_ar * h_ar, 0.0);
    auto midx = [&](int s, int r, int h) {
      return (static_cast<std::size_t>(s) * static_cast<std::size_t>(r_ar) +
              static_cast<std::size_t>(r)) *
                 static_cast<std::size_t>(h_ar) +
             static_cast<std::size_t>(h);
    };
    std::size_t cell = 0;
    for (int mm = 0; mm < m_ar; ++mm)
      for (int aa = 0; aa < a_ar; ++aa)
        for (int hh = 0; hh < h_ar; ++hh, ++cell)
          for (int bb = 0; bb < bins; ++bb) {
            double v = static_cast<double>(tau[cell * static_cast<std::size_t>(bins) +
                                               static_cast<std::size_t>(bb)]) /
                       n;
            if (v == 0.0) continue;
            int s = sender_side ? aa : bb;
            int r = sender_side ? bb : aa;
            marg[midx(s, r, hh)] += v;
          }
    double d1 = 0.0;
    for (std::size_t i = 0; i < marg.size(); ++i) d1 += std::abs(marg[i] - center->p[i]);
    if (d1 > delta + kTieTol) return false;
    double d2 = 0.0;
    cell = 0;
    for (int mm = 0; mm < m_ar; ++mm)
      for (int aa = 0; aa < a_ar; ++aa)
        for (int hh = 0; hh < h_ar; ++hh, ++cell)
          for (int bb = 0; bb < bins; ++bb) {
            double v = static_cast<double>(tau[cell * static_cast<std::size_t>(bins) +
                                               static_cast<std::size_t>(bb)]) /
                       n;
            int s = sender_side ? aa : bb;
            int r = sender_side ? bb : aa;
            std::size_t row = static_cast<std::size_t>(s) * static_cast<std::size_t>(h_ar) +
                              static_cast<std::size_t>(hh);
            d2 += std::abs(v - marg[midx(s, r, hh)] * ch->prob_flat(row, mm));
          }
    return d2 <= delta_prime + kTieTol;
  }
};

bool projected_member(const Seq& m, const Seq& a, const Seq& h, const Dist& center_srh,
                      const Channel& ch, double delta, double delta_prime, int bins,
                      bool sender_side) {
  check_arg(m.n() == a.n() && m.n() == h.n(), "projected membership length mismatch");
  JointType known = joint_empirical_type({&m, &a, &h});
  ProjectedCheck chk{m.arity,
                     sender_side ? a.arity : bins,
                     sender_side ? bins : a.arity,
                     h.arity,
                     &center_srh,
                     &ch,
                     delta,
                     delta_prime,
                     static_cast<double>(m.n()),
                     sender_side};
  std::vector<std::int64_t> tau(known.cells() * static_cast<std::size_t>(bins), 0);
  return split_cell(known.counts, bins, tau, 0, chk);
}

}  // namespace

bool round_member_sender(const Seq& m, const Seq& s, const Seq& h, const RoundTypicalSpec& spec,
                         int r_arity) {
  return projected_member(m, s, h, spec.center_srh, *spec.channel, spec.delta, spec.delta_prime,
                          r_arity, true);
}

bool round_member_receiver(const Seq& m, const Seq& r, const Seq& h, const RoundTypicalSpec& spec,
                           int s_arity) {
  return projected_member(m, r, h, spec.center_srh, *spec.channel, spec.delta, spec.delta_prime,
                          s_arity, false);
}

bool channel_typical_member_sender(const Seq& m, const Seq& x, const ChannelTypicalSpec& spec,
                                   int y_arity) {
  Seq h(1, std::vector<std::uint8_t>(m.n(), 0));
  // center on (X, Y) -> axes (S=X, R=Y, H=trivial)
  Dist center = spec.center_xy.with_trivial_axis();
  return projected_member(m, x, h, center, *spec.channel, spec.delta, spec.delta_prime, y_arity,
                          true);
}

bool channel_typical_member_receiver(const Seq& m, const Seq& y, const ChannelTypicalSpec& spec,
                                     int x_arity) {
  Seq h(1, std::vector<std::uint8_t>(m.n(), 0));
  Dist center = spec.center_xy.with_trivial_axis();
  return projected_member(m, y, h, center, *spec.channel, spec.delta, spec.delta_prime, x_arity,
                          false);
}

bool merge_set_check(const ChannelTypicalSpec& spec, int x_arity, int y_arity, std::size_t n) {
  int m_ar = spec.channel->output_arity;
  double universe = std::pow(static_cast<double>(m_ar) * x_arity * y_arity, static_cast<double>(n));
  check_arg(universe <= static_cast<double>(kEnumCap), "merge_set_check exceeds cap");
  // Merged center p * center on (M, X, Y).
  std::vector<int> ar = {m_ar, x_arity, y_arity};
  std::vector<double> merged(product_of_arities(ar), 0.0);
  for (int mm = 0; mm < m_ar; ++mm)
    for (int xx = 0; xx < x_arity; ++xx)
      for (int yy = 0; yy < y_arity; ++yy)
        merged[(static_cast<std::size_t>(mm) * x_arity + xx) * static_cast<std::size_t>(y_arity) +
               yy] = spec.center_xy.p[static_cast<std::size_t>(xx) * y_arity + yy] *
                     spec.channel->prob_flat(static_cast<std::size_t>(xx), mm);
  Dist merged_center(ar, std::move(merged));
  TypicalSpec merged_spec{merged_center, spec.delta + spec.delta_prime};

  std::size_t mc = 1, xc = 1, yc = 1;
  for (std::size_t i = 0; i < n; ++i) {
    mc *= static_cast<std::size_t>(m_ar);
    xc *= static_cast<std::size_t>(x_arity);
    yc *= static_cast<std::size_t>(y_arity);
  }
  for (std::size_t xi = 0; xi < xc; ++xi) {
    Seq x = seq_from_code(xi, x_arity, n);
    for (std::size_t yi = 0; yi < yc; ++yi) {
      Seq y = seq_from_code(yi, y_arity, n);
      for (std::size_t mi = 0; mi < mc; ++mi) {
        Seq m = seq_from_code(mi, m_ar, n);
        if (!channel_typical_member_triple(m, x, y, spec)) continue;
        if (!typical_member(joint_empirical_type({&m, &x, &y}), merged_spec)) return false;
      }
    }
  }
  return true;
}

}  // namespace typesim
