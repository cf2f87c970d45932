#pragma once

#include <cstddef>
#include <functional>

namespace spectral_wick {

// Worker cap for data-parallel loops.  Reads SPECTRAL_WICK_THREADS once per
// call; falls back to std::thread::hardware_concurrency().  Always >= 1.
std::size_t max_threads();

// Runs body(begin, end) over a static partition of [0, count) on up to
// max_threads() workers.  Partitioning never influences results as long as the
// body writes only to slots in its own range, so outputs are bitwise
// independent of the thread count.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

// Deterministic pairwise (tree) summation.  Used for every statistic that
// feeds a report, so accumulation order never depends on scheduling.
double pairwise_sum(const double* data, std::size_t count);

}  // namespace spectral_wick
