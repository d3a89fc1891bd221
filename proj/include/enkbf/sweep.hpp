#pragma once

#include <functional>

namespace enkbf {

/// Runs fn(0) .. fn(n-1) on an OpenMP worker pool. Tasks must be
/// independent; each writes to its own output slot, so results do not
/// depend on scheduling. threads <= 0 picks the OpenMP default.
void run_indexed_tasks(int n, int threads, const std::function<void(int)>& fn);

/// Serial reference for run_indexed_tasks; the parallel path must produce
/// identical results.
void run_indexed_tasks_serial(int n, const std::function<void(int)>& fn);

/// Resolves the worker count: the ENKBF_LAB_THREADS environment variable
/// wins over `requested`; 0 means the OpenMP default; without OpenMP the
/// result is 1.
int resolve_threads(int requested);

}  // namespace enkbf
