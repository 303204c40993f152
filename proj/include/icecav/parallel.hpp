#pragma once

#include <cstddef>
#include <functional>

namespace icecav {

/// Worker count: `requested` if > 0, else ICECAV_THREADS if set, else hardware concurrency.
int resolve_threads(int requested);

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on up to `threads` workers.
/// Blocks until all chunks finish; rethrows the first exception raised by a worker.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace icecav
