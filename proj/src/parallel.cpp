#include "gmt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace gmt {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads = std::max(1, threads); }

int thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t grain) {
  grain = std::max<std::size_t>(1, grain);
  const std::size_t blocks = (n + grain - 1) / grain;
  const int workers = static_cast<int>(std::min<std::size_t>(blocks, g_threads.load()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      const std::size_t end = std::min(n, (b + 1) * grain);
      for (std::size_t i = b * grain; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

double blocked_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    double s = 0.0;
    for (std::size_t i = b * kBlockSize; i < end; ++i) s += fn(i);
    partial[b] = s;
  }, 1);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

}  // namespace gmt
