#include "typesim/codebook.hpp"

namespace typesim {

std::optional<std::size_t> OrderedCodebook::position_of(std::uint32_t code) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i] == code) return i;
  return std::nullopt;
}

std::vector<std::uint8_t> OrderedCodebook::position_prefix(std::size_t pos, int bits) const {
  check_arg(pos < entries.size(), "position out of range");
  check_arg(bits >= 0 && bits <= index_width, "prefix length out of range");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(bits));
  for (int i = 0; i < bits; ++i)
    out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((pos >> (index_width - 1 - i)) & 1u);
  return out;
}

OrderedCodebook random_codebook(std::vector<std::uint32_t> universe, Tape& tape) {
  check_arg(universe.size() <= kEnumCap, "codebook universe exceeds cap");
  for (std::size_t i = universe.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(tape.draw_uniform(i));
    std::swap(universe[i - 1], universe[j]);
  }
  OrderedCodebook cb;
  cb.entries = std::move(universe);
  cb.index_width = ceil_log2(cb.entries.size());
  return cb;
}

OrderedCodebook ordered_codebook(std::vector<std::uint32_t> universe) {
  check_arg(universe.size() <= kEnumCap, "codebook universe exceeds cap");
  OrderedCodebook cb;
  cb.entries = std::move(universe);
  cb.index_width = ceil_log2(cb.entries.size());
  return cb;
}

OrderedCodebook prefix_filter(const OrderedCodebook& cb, const std::vector<std::uint8_t>& bits) {
  check_arg(static_cast<int>(bits.size()) <= cb.index_width, "prefix longer than index width");
  OrderedCodebook out;
  for (std::size_t pos = 0; pos < cb.entries.size(); ++pos) {
    bool keep = true;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      std::uint8_t b = static_cast<std::uint8_t>((pos >> (cb.index_width - 1 - static_cast<int>(i))) & 1u);
      if (b != bits[i]) {
        keep = false;
        break;
      }
    }
    if (keep) out.entries.push_back(cb.entries[pos]);
  }
  out.index_width = ceil_log2(out.entries.size());
  return out;
}

}  // namespace typesim
