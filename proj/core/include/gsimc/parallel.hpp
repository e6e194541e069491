#pragma once

#include <cstddef>
#include <functional>

namespace gsimc {

/// Hardware concurrency, at least 1.
std::size_t default_threads();

/// Calls body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Indices are split into contiguous blocks; callers write results by index
/// so output never depends on scheduling. The first exception thrown by any
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace gsimc
