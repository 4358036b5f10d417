#pragma once

#include <cstddef>
#include <functional>

namespace alphahyper {

// Number of worker threads: ALPHAHYPER_THREADS when set (at most 256),
// otherwise hardware concurrency.
unsigned worker_count();

// Calls body(i) for i in [0, n). Iterations are independent; results written
// by index are identical for any worker count. The first exception thrown by
// any iteration is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace alphahyper
