#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace typesim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool ran = false;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20250808;
  std::string out_dir = "acceptance_out";
  int threads = 0;
};

// Runs every acceptance criterion in order, printing one pass/fail line per
// criterion. A genuine (non-vacuous) failure halts the suite with the witness
// serialized under out_dir. Returns non-zero when anything failed.
int run_acceptance(const AcceptanceOptions& opts, std::ostream& log,
                   std::vector<CriterionResult>* results = nullptr);

}  // namespace typesim
