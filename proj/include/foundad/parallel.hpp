#pragma once

#include <cstddef>
#include <functional>

namespace foundad {

/// Worker count: FOUNDAD_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, count) across up to worker_count() threads.
/// Callers write results into per-index slots so output never depends on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace foundad
