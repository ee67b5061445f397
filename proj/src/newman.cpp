#include "typesim/newman.hpp"

#include <sstream>

#include "json.hpp"
#include "typesim/parallel.hpp"
#include "typesim/util.hpp"

namespace typesim {

std::string NewmanStrings::to_json() const {
  nlohmann::json j;
  j["s"] = s;
  j["strings"] = strings;
  j["verified_bound"] = verified_bound;
  j["target_fraction"] = target_fraction;
  return j.dump(2);
}

NewmanStrings NewmanStrings::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NewmanStrings ns;
  ns.s = j.at("s").get<std::uint64_t>();
  ns.strings = j.at("strings").get<std::vector<std::uint64_t>>();
  ns.verified_bound = j.at("verified_bound").get<double>();
  ns.target_fraction = j.at("target_fraction").get<double>();
  check_arg(ns.strings.size() == ns.s, "newman strings count mismatch");
  return ns;
}

NewmanStrings newman_select(const std::function<bool(std::uint64_t, std::size_t)>& fails,
                            std::size_t input_count, const NewmanSelectConfig& cfg) {
  check_arg(cfg.s >= 1, "newman_select needs s >= 1");
  check_arg(input_count >= 1, "newman_select needs at least one input");
  double worst_overall = 0.0;
  std::size_t worst_input = 0;
  for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
    std::vector<std::uint64_t> cand(cfg.s);
    for (std::uint64_t i = 0; i < cfg.s; ++i)
      cand[i] = derive_seed(cfg.meta_seed, static_cast<std::uint64_t>(attempt), i);

    std::vector<double> fraction(input_count, 0.0);
    parallel_trials(input_count, cfg.threads, [&](std::size_t input) {
      std::size_t bad = 0;
      for (std::uint64_t k = 0; k < cfg.s; ++k)
        if (fails(cand[k], input)) ++bad;
      fraction[input] = static_cast<double>(bad) / static_cast<double>(cfg.s);
    });

    double worst = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < input_count; ++i)
      if (fraction[i] > worst) {
        worst = fraction[i];
        arg = i;
      }
    if (worst <= cfg.target_fraction) {
      NewmanStrings ns;
      ns.s = cfg.s;
      ns.strings = std::move(cand);
      ns.verified_bound = worst;
      ns.target_fraction = cfg.target_fraction;
      return ns;
    }
    worst_overall = worst;
    worst_input = arg;
  }
  std::ostringstream os;
  os << "newman_select retry limit exhausted: worst input " << worst_input << " fails on "
     << worst_overall << " > " << cfg.target_fraction << " of strings";
  throw std::runtime_error(os.str());
}

}  // namespace typesim
