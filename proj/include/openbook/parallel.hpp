#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace openbook {

// Worker count comes from OPENBOOK_WORKERS; defaults to the hardware count.
inline int worker_count() {
  if (const char* env = std::getenv("OPENBOOK_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return std::min(n, 64);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Deterministic parallel map-reduce: the index range is cut into fixed-size
// blocks, workers fill per-block slots, and the reduction folds the slots in
// block order.  Results are therefore identical for any worker count.
template <typename T, typename Map, typename Reduce>
T parallel_block_reduce(std::int64_t n, T init, Map&& map_block,
                        Reduce&& reduce) {
  constexpr std::int64_t kBlock = 4096;
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<T> slots(static_cast<size_t>(std::max<std::int64_t>(nblocks, 0)),
                       init);
  const int workers = std::min<std::int64_t>(worker_count(), nblocks) > 0
                          ? static_cast<int>(std::min<std::int64_t>(
                                worker_count(), nblocks))
                          : 1;
  std::atomic<std::int64_t> next{0};
  auto body = [&]() {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= nblocks) break;
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(n, lo + kBlock);
      slots[static_cast<size_t>(b)] = map_block(lo, hi);
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  T acc = init;
  for (const T& s : slots) acc = reduce(acc, s);
  return acc;
}

}  // namespace openbook
