#pragma once

#include <cstddef>
#include <functional>

namespace tslab {

/// Worker count: SCATTER_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index is
/// visited exactly once; results written by index are independent of the
/// number of threads. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tslab
