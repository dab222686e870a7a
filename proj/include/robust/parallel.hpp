#pragma once

#include <cstdint>
#include <functional>

namespace robust {

// Resolves a thread-count request: values >= 1 pass through; anything else
// falls back to the ROBUST_THREADS environment variable, then to the
// hardware concurrency, then to 1.
int resolve_threads(int requested);

// Runs fn(i) for every i in [0, n) on up to `threads` workers with a static
// block partition. Results must be written to per-index slots of storage
// preallocated by the caller; under that discipline the output is identical
// for every thread count. The first exception thrown by fn is rethrown on
// the calling thread after all workers join.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& fn);

// Sum with pairwise (cascade) splitting: a fixed, order-stable reduction
// tree whose roundoff grows like log n instead of n.
double pairwise_sum(const double* xs, std::int64_t n);

}  // namespace robust
