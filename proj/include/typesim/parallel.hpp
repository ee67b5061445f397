#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace typesim {

// Fans independent trials out across OpenMP threads. Each body(i) must be
// self-contained (per-trial derived seeds, no shared mutable state); results
// land in pre-sized slots so aggregation order never matters. threads == 1 is
// the serial reference path; 0 picks the runtime default.
template <class Body>
void parallel_trials(std::size_t count, int threads, Body&& body) {
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
#if defined(_OPENMP)
  if (threads > 1) omp_set_num_threads(threads);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < static_cast<long long>(count); ++i)
    body(static_cast<std::size_t>(i));
#else
  for (std::size_t i = 0; i < count; ++i) body(i);
#endif
}

inline int parallel_max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace typesim
