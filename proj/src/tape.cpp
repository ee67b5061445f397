#include "typesim/tape.hpp"

namespace typesim {

std::uint64_t Tape::next_word() {
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int Tape::draw_bit() {
  if (buffered_ == 0) {
    buffer_ = next_word();
    buffered_ = 64;
  }
  int b = static_cast<int>(buffer_ & 1ull);
  buffer_ >>= 1;
  --buffered_;
  ++bits_drawn_;
  return b;
}

std::uint64_t Tape::draw_bits(int k) {
  check_arg(k >= 0 && k <= 64, "draw_bits takes 0..64 bits");
  std::uint64_t v = 0;
  for (int i = 0; i < k; ++i) v = (v << 1) | static_cast<std::uint64_t>(draw_bit());
  return v;
}

std::vector<std::uint8_t> Tape::draw_bit_vec(int k) {
  check_arg(k >= 0, "draw_bit_vec takes k >= 0");
  std::vector<std::uint8_t> v(static_cast<std::size_t>(k));
  for (auto& b : v) b = static_cast<std::uint8_t>(draw_bit());
  return v;
}

std::uint64_t Tape::draw_uniform(std::uint64_t bound) {
  if (bound <= 1) return 0;
  int k = ceil_log2(bound);
  for (;;) {
    std::uint64_t v = draw_bits(k);
    if (v < bound) return v;
  }
}

double Tape::draw_unit() {
  std::uint64_t v = draw_bits(53);
  return static_cast<double>(v) * 0x1.0p-53;
}

void CostLedger::add_message(Direction dir, std::uint64_t bits, std::string label) {
  messages.push_back(MessageRec{dir, bits, std::move(label)});
}

std::uint64_t CostLedger::comm_total() const {
  std::uint64_t s = 0;
  for (const auto& m : messages) s += m.bits;
  return s;
}

std::vector<std::pair<Direction, std::uint64_t>> CostLedger::rounds() const {
  std::vector<std::pair<Direction, std::uint64_t>> r;
  for (const auto& m : messages) {
    if (!r.empty() && r.back().first == m.dir)
      r.back().second += m.bits;
    else
      r.emplace_back(m.dir, m.bits);
  }
  return r;
}

int CostLedger::round_count() const { return static_cast<int>(rounds().size()); }

std::uint64_t CostLedger::round_bits(int round) const {
  auto r = rounds();
  check_arg(round >= 0 && round < static_cast<int>(r.size()), "round index out of range");
  return r[static_cast<std::size_t>(round)].second;
}

void CostLedger::merge_from(const CostLedger& other) {
  for (const auto& m : other.messages) messages.push_back(m);
  shared_structural += other.shared_structural;
  shared_rate += other.shared_rate;
  private_a += other.private_a;
  private_b += other.private_b;
}

CostLedger cost_report(const std::vector<const Tape*>& tapes) {
  CostLedger l;
  for (const Tape* t : tapes) {
    switch (t->category()) {
      case TapeCategory::shared_structural: l.shared_structural += t->bits_drawn(); break;
      case TapeCategory::shared_rate: l.shared_rate += t->bits_drawn(); break;
      case TapeCategory::private_a: l.private_a += t->bits_drawn(); break;
      case TapeCategory::private_b: l.private_b += t->bits_drawn(); break;
      case TapeCategory::env: break;
    }
  }
  return l;
}

}  // namespace typesim
