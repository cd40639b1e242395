#pragma once

#include <cstddef>
#include <functional>

namespace lplab {

/// Worker count: hardware concurrency, capped by LP_LAB_THREADS when set.
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Callers
/// write results into per-index slots, so output order never depends on the
/// schedule. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lplab
