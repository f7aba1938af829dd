#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace sff {

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(begin, end) over disjoint chunks of [0, n). Results must be
/// written to per-index slots so the split cannot change the outcome.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  int workers = resolve_jobs(jobs);
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    std::size_t end = begin + chunk < n ? begin + chunk : n;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sff
