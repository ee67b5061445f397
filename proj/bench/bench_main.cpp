// Compares the serial reference trial loop against the OpenMP fan-out on a
// channel-simulation workload and checks that both produce identical
// aggregates (per-trial derived seeds make scheduling irrelevant).

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "typesim/experiment.hpp"
#include "typesim/parallel.hpp"

using namespace typesim;

namespace {

ExperimentConfig workload(std::uint64_t trials, int threads) {
  ExperimentConfig cfg;
  cfg.protocol = "rst_fixed_type";
  cfg.params.n = 8;
  cfg.params.delta = 0.15;
  cfg.params.delta_prime = 0.15;
  cfg.params.delta_double_prime = 0.15;
  cfg.channels = {Channel::bsc(0.2)};
  cfg.input.kind = InputLaw::Kind::fixed;
  cfg.input.x_fixed = {0, 1, 1, 0, 1, 0, 0, 1};
  cfg.input.y_fixed = {0, 1, 1, 0, 1, 0, 0, 0};
  cfg.trials = trials;
  cfg.seed = 42;
  cfg.threads = threads;
  return cfg;
}

double run_timed(const ExperimentConfig& cfg, std::string* csv) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r = run_experiment(cfg);
  auto t1 = std::chrono::steady_clock::now();
  *csv = std::move(r.csv);
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  std::string serial_csv, parallel_csv;
  double ts = run_timed(workload(trials, 1), &serial_csv);
  double tp = run_timed(workload(trials, 0), &parallel_csv);
  std::cout << "trials:   " << trials << "\n"
            << "serial:   " << ts << " s (" << static_cast<double>(trials) / ts << " trials/s)\n"
            << "parallel: " << tp << " s (" << static_cast<double>(trials) / tp << " trials/s, "
            << parallel_max_threads() << " threads)\n"
            << "speedup:  " << ts / tp << "x\n";
  if (serial_csv != parallel_csv) {
    std::cout << "MISMATCH: serial and parallel outputs differ\n";
    return 1;
  }
  std::cout << "outputs identical\n";
  return 0;
}
