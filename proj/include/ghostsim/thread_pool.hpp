#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace ghostsim {

/// Runs body(begin_k, end_k) over a static split of [begin, end) into
/// `workers` contiguous chunks. The split depends only on `workers`, and
/// chunks touch disjoint data in every use here, so results do not depend on
/// scheduling. workers <= 1 (or a small range) runs inline.
template <typename Body>
void parallel_for(int workers, std::int64_t begin, std::int64_t end, Body&& body) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  if (workers <= 1 || count < 2) {
    body(begin, end);
    return;
  }
  const int w = static_cast<int>(std::min<std::int64_t>(workers, count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(w - 1));
  auto chunk = [&](int k) {
    const std::int64_t lo = begin + count * k / w;
    const std::int64_t hi = begin + count * (k + 1) / w;
    body(lo, hi);
  };
  for (int k = 1; k < w; ++k) threads.emplace_back(chunk, k);
  chunk(0);
  for (auto& t : threads) t.join();
}

inline int default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace ghostsim
