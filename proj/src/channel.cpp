#include "typesim/channel.hpp"

#include <cmath>

namespace typesim {

Channel::Channel(std::vector<int> in_ar, int out_ar, std::vector<double> tab)
    : input_arities(std::move(in_ar)), output_arity(out_ar), table(std::move(tab)) {
  check_arg(output_arity >= 1, "channel output arity must be >= 1");
  std::size_t r = product_of_arities(input_arities);
  check_arg(table.size() == r * static_cast<std::size_t>(output_arity),
            "channel table size mismatch");
  for (std::size_t i = 0; i < r; ++i) {
    double s = 0.0;
    for (int m = 0; m < output_arity; ++m) {
      double v = prob_flat(i, m);
      check_arg(v >= -1e-15, "channel entries must be non-negative");
      s += v;
    }
    check_arg(std::abs(s - 1.0) <= 1e-12, "channel row must sum to 1");
  }
}

std::size_t Channel::rows() const { return product_of_arities(input_arities); }

std::size_t Channel::row_index(const std::vector<int>& inputs) const {
  check_arg(inputs.size() == input_arities.size(), "channel input rank mismatch");
  std::size_t f = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    check_arg(inputs[i] >= 0 && inputs[i] < input_arities[i], "channel input out of range");
    f = f * static_cast<std::size_t>(input_arities[i]) + static_cast<std::size_t>(inputs[i]);
  }
  return f;
}

int Channel::sample_flat(std::size_t input_code, Tape& rng) const {
  double u = rng.draw_unit();
  double acc = 0.0;
  for (int m = 0; m < output_arity; ++m) {
    acc += prob_flat(input_code, m);
    if (u < acc) return m;
  }
  return output_arity - 1;
}

int Channel::sample(const std::vector<int>& inputs, Tape& rng) const {
  return sample_flat(row_index(inputs), rng);
}

Channel Channel::identity(int arity) {
  std::vector<double> t(static_cast<std::size_t>(arity) * arity, 0.0);
  for (int i = 0; i < arity; ++i) t[static_cast<std::size_t>(i) * arity + i] = 1.0;
  return Channel({arity}, arity, std::move(t));
}

Channel Channel::constant(int input_arity, int output_arity, int symbol) {
  check_arg(symbol >= 0 && symbol < output_arity, "constant channel symbol out of range");
  std::vector<double> t(static_cast<std::size_t>(input_arity) * output_arity, 0.0);
  for (int i = 0; i < input_arity; ++i)
    t[static_cast<std::size_t>(i) * output_arity + symbol] = 1.0;
  return Channel({input_arity}, output_arity, std::move(t));
}

Channel Channel::bsc(double flip) {
  check_arg(flip >= 0.0 && flip <= 1.0, "bsc flip probability outside [0,1]");
  return Channel({2}, 2, {1.0 - flip, flip, flip, 1.0 - flip});
}

Channel Channel::lift(const Channel& base, const std::vector<int>& extra_inputs) {
  check_arg(base.input_arities.size() == 1, "lift expects a single-input channel");
  std::vector<int> in = base.input_arities;
  in.insert(in.end(), extra_inputs.begin(), extra_inputs.end());
  std::size_t extra = product_of_arities(extra_inputs);
  std::vector<double> t;
  t.reserve(product_of_arities(in) * static_cast<std::size_t>(base.output_arity));
  for (int x = 0; x < base.input_arities[0]; ++x)
    for (std::size_t e = 0; e < extra; ++e)
      for (int m = 0; m < base.output_arity; ++m)
        t.push_back(base.prob_flat(static_cast<std::size_t>(x), m));
  return Channel(std::move(in), base.output_arity, std::move(t));
}

Channel Channel::reshape_inputs(std::vector<int> new_arities) const {
  check_arg(product_of_arities(new_arities) == rows(), "reshape must preserve the row space");
  Channel c = *this;
  c.input_arities = std::move(new_arities);
  return c;
}

Dist append_channel(const Dist& base, const Channel& ch, const std::vector<int>& input_coords) {
  check_arg(input_coords.size() == ch.input_arities.size(), "append_channel input rank mismatch");
  for (std::size_t i = 0; i < input_coords.size(); ++i) {
    int c = input_coords[i];
    check_arg(c >= 0 && c < base.coords(), "append_channel coordinate out of range");
    check_arg(base.arities[c] == ch.input_arities[i], "append_channel arity mismatch");
  }
  Dist out;
  out.arities = base.arities;
  out.arities.push_back(ch.output_arity);
  out.p.resize(base.p.size() * static_cast<std::size_t>(ch.output_arity));
  std::vector<int> idx;
  for (std::size_t f = 0; f < base.p.size(); ++f) {
    base.unflatten(f, idx);
    std::size_t row = 0;
    for (std::size_t i = 0; i < input_coords.size(); ++i)
      row = row * static_cast<std::size_t>(ch.input_arities[i]) +
            static_cast<std::size_t>(idx[input_coords[i]]);
    for (int m = 0; m < ch.output_arity; ++m)
      out.p[f * static_cast<std::size_t>(ch.output_arity) + static_cast<std::size_t>(m)] =
          base.p[f] * ch.prob_flat(row, m);
  }
  return out;
}

std::vector<double> exact_output_distribution(const Channel& ch, const Seq& x) {
  check_arg(ch.input_arities.size() == 1, "exact_output_distribution expects single-input channel");
  check_arg(ch.input_arities[0] == x.arity, "exact_output_distribution arity mismatch");
  std::size_t n = x.n();
  double space = std::pow(static_cast<double>(ch.output_arity), static_cast<double>(n));
  check_arg(space <= static_cast<double>(kEnumCap), "output space exceeds enumeration cap");
  std::size_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) cells *= static_cast<std::size_t>(ch.output_arity);
  std::vector<double> out(cells, 1.0);
  // Build by position, refining prefix products.
  std::size_t block = cells;
  for (std::size_t i = 0; i < n; ++i) {
    block /= static_cast<std::size_t>(ch.output_arity);
    for (std::size_t c = 0; c < cells; ++c) {
      int m = static_cast<int>((c / block) % static_cast<std::size_t>(ch.output_arity));
      out[c] *= ch.prob_flat(static_cast<std::size_t>(x.sym[i]), m);
    }
  }
  return out;
}

Seq apply_channel(const Channel& ch, const Seq& x, Tape& rng) {
  check_arg(ch.input_arities.size() == 1 && ch.input_arities[0] == x.arity,
            "apply_channel arity mismatch");
  Seq m;
  m.arity = ch.output_arity;
  m.sym.resize(x.n());
  for (std::size_t i = 0; i < x.n(); ++i)
    m.sym[i] = static_cast<std::uint8_t>(ch.sample_flat(x.sym[i], rng));
  return m;
}

}  // namespace typesim
