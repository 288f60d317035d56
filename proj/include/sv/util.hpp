#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace sv {

/// Index-parallel loop; results written by index stay deterministic
/// regardless of the thread count.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  int nw = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t)
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace sv
