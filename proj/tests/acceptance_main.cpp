// Acceptance runner: one pass/fail line per criterion, non-zero exit on any
// genuine failure.

#include <cstring>
#include <iostream>

#include "typesim/acceptance.hpp"

int main(int argc, char** argv) {
  typesim::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) opts.out_dir = argv[++i];
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      opts.threads = std::atoi(argv[++i]);
  }
  return typesim::run_acceptance(opts, std::cout);
}
