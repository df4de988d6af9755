#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace piezo {

/// kSerial is the reference path; kParallel must give identical results.
enum class Execution { kSerial, kParallel };

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Calls f(i) for i in [0, count). Items must be independent and write only
/// to their own slot; output order is then deterministic either way.
template <class F>
void for_each_index(std::ptrdiff_t count, Execution exec, F&& f) {
  if (exec == Execution::kSerial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) f(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) f(i);
}

}  // namespace piezo
