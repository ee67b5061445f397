#include "typesim/seq.hpp"

namespace typesim {

std::uint64_t seq_code(const Seq& s) {
  std::uint64_t c = 0;
  for (auto v : s.sym) c = c * static_cast<std::uint64_t>(s.arity) + v;
  return c;
}

Seq seq_from_code(std::uint64_t code, int arity, std::size_t n) {
  Seq s;
  s.arity = arity;
  s.sym.resize(n);
  for (std::size_t i = n; i-- > 0;) {
    s.sym[i] = static_cast<std::uint8_t>(code % static_cast<std::uint64_t>(arity));
    code /= static_cast<std::uint64_t>(arity);
  }
  return s;
}

Seq flatten_seqs(const std::vector<const Seq*>& parts) {
  check_arg(!parts.empty(), "flatten_seqs needs at least one sequence");
  std::size_t n = parts[0]->n();
  std::uint64_t arity = 1;
  for (const Seq* p : parts) {
    check_arg(p->n() == n, "flatten_seqs length mismatch");
    arity *= static_cast<std::uint64_t>(p->arity);
  }
  check_arg(arity <= 255, "flattened alphabet too large for Seq storage");
  Seq out;
  out.arity = static_cast<int>(arity);
  out.sym.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t v = 0;
    for (const Seq* p : parts) v = v * static_cast<std::uint64_t>(p->arity) + p->sym[i];
    out.sym[i] = static_cast<std::uint8_t>(v);
  }
  return out;
}

}  // namespace typesim
