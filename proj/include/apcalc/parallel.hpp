#pragma once
// Deterministic helper for data-parallel loops. Work items write to
// per-index slots only; callers combine results in index order afterwards,
// so outputs do not depend on the thread count.

#include <cstddef>
#include <thread>
#include <vector>

namespace apcalc {

template <typename Fn>
void parallel_for(std::size_t total, int threads, Fn&& fn) {
  if (threads <= 1 || total <= 1) {
    for (std::size_t i = 0; i < total; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), total);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < total; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace apcalc
