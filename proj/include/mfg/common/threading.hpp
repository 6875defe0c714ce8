#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mfg {

// Worker cap: MFG_LANE_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("MFG_LANE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs f(i) for i in [0, n). Work items must write to disjoint state; the
// index partition is static so results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mfg
