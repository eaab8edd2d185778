#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gmt {

// Process-wide worker count. Results never depend on it: work is split into
// fixed-size blocks and partial results are combined in block order.
void set_thread_count(int threads);
int thread_count();

inline constexpr std::size_t kBlockSize = 256;

// Calls fn(i) for every i in [0, n). Each index is visited exactly once.
// Workers claim contiguous chunks of `grain` indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t grain = kBlockSize);

// Sum of fn(i) over [0, n) with a thread-count independent reduction tree.
double blocked_sum(std::size_t n, const std::function<double(std::size_t)>& fn);

// Neumaier-compensated sum; used where a mass must be reproduced to ~1 ulp.
double compensated_sum(const std::vector<double>& values);

}  // namespace gmt
