#pragma once

#include <cstddef>
#include <functional>

namespace perinv {

/// Worker count: an explicit positive request wins, then PERINV_THREADS, then
/// the hardware concurrency.
int resolve_threads(int requested = 0);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once, so writing results into slot i keeps the output
/// independent of scheduling. The first exception thrown by a body is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace perinv
