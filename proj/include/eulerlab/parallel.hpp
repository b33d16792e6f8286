#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace eulerlab {

// Worker-thread cap. EULER_LAB_THREADS overrides hardware concurrency.
inline int max_threads() {
  static const int cached = [] {
    if (const char* env = std::getenv("EULER_LAB_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }();
  return cached;
}

// Partition [0,n) into contiguous blocks, one thread per block. Results are
// bit-identical for any thread count as long as `body` writes disjoint
// locations and performs no reductions.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const int nthreads = std::min<std::size_t>(max_threads(), n == 0 ? 1 : n);
  if (nthreads <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace eulerlab
