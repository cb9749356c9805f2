#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace din {

/// Number of OpenMP threads parallel regions will use (1 without OpenMP).
inline int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs fn(i) for i in [0, n) across OpenMP threads. Iterations must not
/// share mutable state. The exception of the lowest failing index is
/// rethrown on the calling thread once the loop finishes.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn, int threads = 0) {
  std::exception_ptr error;
  std::ptrdiff_t error_index = n;
  std::mutex error_mutex;
  if (threads <= 0) threads = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (i < error_index) {
        error = std::current_exception();
        error_index = i;
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace din
