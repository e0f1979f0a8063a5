#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dqc {

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, n) on a small worker pool. Bodies must be
// independent; any escaped exception is rethrown on the calling thread after
// all workers join. Cell-level quarantine is the caller's business: catch
// inside the body and record the failure there.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& body) {
  if (workers <= 0) workers = default_workers();
  if (n == 0) return;
  if (workers == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::size_t>(workers, n));
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dqc
