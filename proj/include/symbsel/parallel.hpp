#ifndef SYMBSEL_PARALLEL_HPP_
#define SYMBSEL_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace symbsel {

/// Runs fn(i) for i in [0, n) across up to `jobs` threads. Results must be
/// written by index so the outcome is independent of scheduling.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const size_t chunk = (n + static_cast<size_t>(workers) - 1) /
                       static_cast<size_t>(workers);
  for (int w = 0; w < workers; ++w) {
    const size_t lo = static_cast<size_t>(w) * chunk;
    const size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace symbsel

#endif  // SYMBSEL_PARALLEL_HPP_
