#pragma once

#include <cstdint>
#include <vector>

namespace typesim {

// Dense probability table over a product alphabet, row-major with the last
// coordinate varying fastest. All measures in this project are finite and
// small, so everything is stored explicitly.
struct Dist {
  std::vector<int> arities;
  std::vector<double> p;

  Dist() = default;
  Dist(std::vector<int> ar, std::vector<double> probs);

  int coords() const { return static_cast<int>(arities.size()); }
  std::size_t cells() const { return p.size(); }

  std::size_t flat_index(const std::vector<int>& idx) const;
  void unflatten(std::size_t flat, std::vector<int>& idx) const;

  double at(const std::vector<int>& idx) const { return p[flat_index(idx)]; }

  // Marginal onto the given coordinates, in the given order.
  Dist marginal(const std::vector<int>& coords) const;

  // Reorder coordinates.
  Dist permute(const std::vector<int>& order) const;

  // Merge the trailing k coordinates into a single coordinate whose arity is
  // their product. Cell layout is unchanged (row-major flattening is
  // associative), only the shape changes.
  Dist flatten_tail(int k) const;

  // Append an arity-1 coordinate.
  Dist with_trivial_axis() const;

  static Dist uniform(std::vector<int> arities);
  static Dist point_mass(std::vector<int> arities, const std::vector<int>& symbol);
};

// Independent product of two distributions (coordinates of b appended after a).
Dist product(const Dist& a, const Dist& b);

std::size_t product_of_arities(const std::vector<int>& arities);

}  // namespace typesim
