#include "typesim/interactive.hpp"

#include <cmath>

#include "typesim/info_math.hpp"
#include "typesim/types.hpp"

namespace typesim {

void InteractiveSpec::validate() const {
  check_arg(x_arity >= 1 && y_arity >= 1, "alphabet arities must be >= 1");
  check_arg(!channels.empty(), "interactive spec needs at least one round");
  for (int i = 0; i < rounds(); ++i) {
    const Channel& ch = channels[static_cast<std::size_t>(i)];
    std::vector<int> expect = {alice_sends(i) ? x_arity : y_arity};
    for (int k = 0; k < i; ++k) expect.push_back(message_arity(k));
    check_arg(ch.input_arities == expect, "channel input arities do not match round owner/history");
  }
}

std::size_t InteractiveSpec::transcript_cells() const {
  std::size_t c = 1;
  for (const auto& ch : channels) c *= static_cast<std::size_t>(ch.output_arity);
  return c;
}

InteractiveSpec InteractiveSpec::from_presets(int x_arity, int y_arity,
                                              const std::vector<Channel>& single_input) {
  InteractiveSpec spec;
  spec.x_arity = x_arity;
  spec.y_arity = y_arity;
  std::vector<int> hist;
  for (std::size_t i = 0; i < single_input.size(); ++i) {
    const Channel& base = single_input[i];
    check_arg(base.input_arities.size() == 1, "preset channels must be single-input");
    int owner_ar = (i % 2 == 0) ? x_arity : y_arity;
    check_arg(base.input_arities[0] == owner_ar, "preset channel input arity mismatch");
    spec.channels.push_back(hist.empty() ? base : Channel::lift(base, hist));
    hist.push_back(base.output_arity);
  }
  spec.validate();
  return spec;
}

std::vector<Seq> run_reference_interactive(const InteractiveSpec& spec, const Seq& x, const Seq& y,
                                           Tape& rng) {
  spec.validate();
  check_arg(x.arity == spec.x_arity && y.arity == spec.y_arity, "input arity mismatch");
  check_arg(x.n() == y.n(), "input length mismatch");
  std::size_t n = x.n();
  std::vector<Seq> transcript;
  for (int i = 0; i < spec.rounds(); ++i) {
    const Channel& ch = spec.channels[static_cast<std::size_t>(i)];
    const Seq& own = spec.alice_sends(i) ? x : y;
    Seq m;
    m.arity = ch.output_arity;
    m.sym.resize(n);
    std::vector<int> in(static_cast<std::size_t>(i) + 1);
    for (std::size_t pos = 0; pos < n; ++pos) {
      in[0] = own.sym[pos];
      for (int k = 0; k < i; ++k) in[static_cast<std::size_t>(k) + 1] = transcript[static_cast<std::size_t>(k)].sym[pos];
      m.sym[pos] = static_cast<std::uint8_t>(ch.sample(in, rng));
    }
    transcript.push_back(std::move(m));
  }
  return transcript;
}

std::size_t TranscriptDist::index(const std::vector<std::uint64_t>& round_codes) const {
  check_arg(round_codes.size() == round_spaces.size(), "transcript rank mismatch");
  std::size_t f = 0;
  for (std::size_t i = 0; i < round_codes.size(); ++i) {
    check_arg(round_codes[i] < round_spaces[i], "transcript code out of range");
    f = f * round_spaces[i] + static_cast<std::size_t>(round_codes[i]);
  }
  return f;
}

TranscriptDist exact_transcript_distribution(const InteractiveSpec& spec, const Seq& x,
                                             const Seq& y) {
  spec.validate();
  std::size_t n = x.n();
  check_arg(y.n() == n, "input length mismatch");
  TranscriptDist td;
  std::size_t total = 1;
  for (int i = 0; i < spec.rounds(); ++i) {
    double space = std::pow(static_cast<double>(spec.message_arity(i)), static_cast<double>(n));
    check_arg(space <= static_cast<double>(kEnumCap), "transcript space exceeds cap");
    std::size_t s = 1;
    for (std::size_t k = 0; k < n; ++k) s *= static_cast<std::size_t>(spec.message_arity(i));
    td.round_spaces.push_back(s);
    check_arg(total <= kEnumCap / s, "transcript space exceeds cap");
    total *= s;
  }
  td.p.assign(total, 0.0);

  std::vector<Seq> msgs(static_cast<std::size_t>(spec.rounds()));
  std::vector<std::uint64_t> codes(static_cast<std::size_t>(spec.rounds()), 0);
  std::vector<int> in;
  // Iterate the full flat space; decode per-round codes and chain the product.
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    for (std::size_t i = td.round_spaces.size(); i-- > 0;) {
      codes[i] = rem % td.round_spaces[i];
      rem /= td.round_spaces[i];
    }
    for (int i = 0; i < spec.rounds(); ++i)
      msgs[static_cast<std::size_t>(i)] =
          seq_from_code(codes[static_cast<std::size_t>(i)], spec.message_arity(i), n);
    double prob = 1.0;
    for (int i = 0; i < spec.rounds() && prob > 0.0; ++i) {
      const Channel& ch = spec.channels[static_cast<std::size_t>(i)];
      const Seq& own = spec.alice_sends(i) ? x : y;
      in.assign(static_cast<std::size_t>(i) + 1, 0);
      for (std::size_t pos = 0; pos < n && prob > 0.0; ++pos) {
        in[0] = own.sym[pos];
        for (int k = 0; k < i; ++k)
          in[static_cast<std::size_t>(k) + 1] = msgs[static_cast<std::size_t>(k)].sym[pos];
        prob *= ch.prob(in, msgs[static_cast<std::size_t>(i)].sym[pos]);
      }
    }
    td.p[f] = prob;
  }
  return td;
}

Dist joint_with_transcript(const Dist& t_xy, const InteractiveSpec& spec) {
  spec.validate();
  check_arg(t_xy.coords() == 2 && t_xy.arities[0] == spec.x_arity &&
                t_xy.arities[1] == spec.y_arity,
            "input distribution shape mismatch");
  Dist d = t_xy;
  for (int i = 0; i < spec.rounds(); ++i) {
    std::vector<int> inputs = {spec.alice_sends(i) ? 0 : 1};
    for (int k = 0; k < i; ++k) inputs.push_back(2 + k);
    d = append_channel(d, spec.channels[static_cast<std::size_t>(i)], inputs);
  }
  return d;
}

double information_complexity(const Dist& t_xy, const InteractiveSpec& spec) {
  Dist d = joint_with_transcript(t_xy, spec);
  std::vector<int> msgs;
  for (int i = 0; i < spec.rounds(); ++i) msgs.push_back(2 + i);
  return conditional_mutual_information(d, msgs, {0}, {1}) +
         conditional_mutual_information(d, msgs, {1}, {0});
}

double prior_free_ic_over_types(const InteractiveSpec& spec, std::int64_t n) {
  auto types = enumerate_types(n, {spec.x_arity, spec.y_arity});
  double best = 0.0;
  for (const auto& t : types) best = std::max(best, information_complexity(t.to_dist(), spec));
  return best;
}

}  // namespace typesim
