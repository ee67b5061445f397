#include "typesim/dist.hpp"

#include <cmath>

#include "typesim/util.hpp"

namespace typesim {

std::size_t product_of_arities(const std::vector<int>& arities) {
  std::size_t n = 1;
  for (int a : arities) {
    check_arg(a >= 1, "arity must be >= 1");
    n *= static_cast<std::size_t>(a);
  }
  return n;
}

Dist::Dist(std::vector<int> ar, std::vector<double> probs)
    : arities(std::move(ar)), p(std::move(probs)) {
  check_arg(!arities.empty(), "Dist needs at least one coordinate");
  check_arg(p.size() == product_of_arities(arities), "Dist table size mismatch");
  double sum = 0.0;
  for (double v : p) {
    check_arg(v >= -1e-15, "Dist entries must be non-negative");
    sum += v;
  }
  check_arg(std::abs(sum - 1.0) <= 1e-12, "Dist entries must sum to 1");
}

std::size_t Dist::flat_index(const std::vector<int>& idx) const {
  check_arg(idx.size() == arities.size(), "index rank mismatch");
  std::size_t f = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    check_arg(idx[i] >= 0 && idx[i] < arities[i], "index out of range");
    f = f * static_cast<std::size_t>(arities[i]) + static_cast<std::size_t>(idx[i]);
  }
  return f;
}

void Dist::unflatten(std::size_t flat, std::vector<int>& idx) const {
  idx.resize(arities.size());
  for (std::size_t i = arities.size(); i-- > 0;) {
    idx[i] = static_cast<int>(flat % static_cast<std::size_t>(arities[i]));
    flat /= static_cast<std::size_t>(arities[i]);
  }
}

Dist Dist::marginal(const std::vector<int>& coords) const {
  check_arg(!coords.empty(), "marginal needs a non-empty coordinate set");
  std::vector<int> out_ar;
  for (int c : coords) {
    check_arg(c >= 0 && c < static_cast<int>(arities.size()), "coordinate out of range");
    out_ar.push_back(arities[c]);
  }
  std::vector<double> out(product_of_arities(out_ar), 0.0);
  std::vector<int> idx;
  for (std::size_t f = 0; f < p.size(); ++f) {
    unflatten(f, idx);
    std::size_t g = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
      g = g * static_cast<std::size_t>(out_ar[i]) + static_cast<std::size_t>(idx[coords[i]]);
    out[g] += p[f];
  }
  Dist d;
  d.arities = std::move(out_ar);
  d.p = std::move(out);
  return d;
}

Dist Dist::permute(const std::vector<int>& order) const {
  check_arg(order.size() == arities.size(), "permute order rank mismatch");
  return marginal(order);
}

Dist Dist::flatten_tail(int k) const {
  check_arg(k >= 1 && k <= coords(), "flatten_tail range");
  Dist d;
  d.p = p;
  d.arities.assign(arities.begin(), arities.end() - k);
  std::size_t tail = 1;
  for (int i = coords() - k; i < coords(); ++i) tail *= static_cast<std::size_t>(arities[i]);
  d.arities.push_back(static_cast<int>(tail));
  return d;
}

Dist Dist::with_trivial_axis() const {
  Dist d = *this;
  d.arities.push_back(1);
  return d;
}

Dist Dist::uniform(std::vector<int> arities) {
  std::size_t n = product_of_arities(arities);
  return Dist(std::move(arities), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Dist Dist::point_mass(std::vector<int> arities, const std::vector<int>& symbol) {
  std::size_t n = product_of_arities(arities);
  std::vector<double> p(n, 0.0);
  Dist d;
  d.arities = std::move(arities);
  d.p = std::move(p);
  d.p[d.flat_index(symbol)] = 1.0;
  return d;
}

Dist product(const Dist& a, const Dist& b) {
  Dist d;
  d.arities = a.arities;
  d.arities.insert(d.arities.end(), b.arities.begin(), b.arities.end());
  d.p.resize(a.p.size() * b.p.size());
  for (std::size_t i = 0; i < a.p.size(); ++i)
    for (std::size_t j = 0; j < b.p.size(); ++j) d.p[i * b.p.size() + j] = a.p[i] * b.p[j];
  return d;
}

}  // namespace typesim
