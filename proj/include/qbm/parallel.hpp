// parallel.hpp — static-partition parallel loop capped by QBM_MAX_THREADS

#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace qbm {

// Worker count: QBM_MAX_THREADS if set and positive, else hardware concurrency (>= 1).
std::size_t max_threads();

// Calls body(i) for i in [0, n). Each index is visited exactly once; the first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qbm
