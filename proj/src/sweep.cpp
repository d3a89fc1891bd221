#include "enkbf/sweep.hpp"

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace enkbf {

void run_indexed_tasks_serial(int n, const std::function<void(int)>& fn) {
  for (int i = 0; i < n; ++i) fn(i);
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("ENKBF_LAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) requested = parsed;
  }
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  return 1;
#endif
}

void run_indexed_tasks(int n, int threads, const std::function<void(int)>& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n <= 1) {
    run_indexed_tasks_serial(n, fn);
    return;
  }
#ifdef _OPENMP
  // Exceptions cannot cross the parallel region; capture the first one and
  // rethrow after the join.
  std::exception_ptr first_error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
#else
  run_indexed_tasks_serial(n, fn);
#endif
}

}  // namespace enkbf
