#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace emenc {

/// Runs body(lo, hi) over contiguous slabs of [begin, end) on up to `threads` threads.
/// Slabs are disjoint, so bodies that write only inside their slab are race free.
template <class Body>
void parallel_slabs(int threads, int begin, int end, Body&& body) {
  const int n = end - begin;
  if (n <= 0) return;
  const int t = std::clamp(threads, 1, n);
  if (t == 1) {
    body(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t - 1));
  const int chunk = (n + t - 1) / t;
  for (int w = 1; w < t; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo < hi) pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  body(begin, std::min(end, begin + chunk));
  for (auto& th : pool) th.join();
}

}  // namespace emenc
