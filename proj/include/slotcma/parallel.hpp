#pragma once

#include <thread>
#include <vector>

namespace slotcma {

// Static range partition; each index is processed by exactly one worker with
// a fixed internal order, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(int n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(n) * t / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace slotcma
