#pragma once

#include <functional>
#include <thread>
#include <vector>

#include "ae/types.hpp"

namespace ae {

/// Runs fn over [0, n) split into at most `threads` contiguous ranges, one
/// worker thread per range. Workers write disjoint outputs, so results do not
/// depend on the thread count.
inline void parallel_ranges(Index n, int threads,
                            const std::function<void(Index, Index)>& fn) {
  if (n <= 0) return;
  const Index workers = std::max<Index>(1, std::min<Index>(threads, n));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const Index base = n / workers, extra = n % workers;
  Index begin = 0;
  for (Index t = 0; t < workers; ++t) {
    const Index len = base + (t < extra ? 1 : 0);
    pool.emplace_back(fn, begin, begin + len);
    begin += len;
  }
  for (auto& th : pool) th.join();
}

}  // namespace ae
