#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gecrb {

// Runs fn(i) for every i in [0, n) across `jobs` threads. fn must be safe to
// call concurrently for distinct indices; callers collect results into
// preallocated index-addressed slots so output order never depends on
// scheduling. The first exception thrown by any worker is rethrown on the
// calling thread after all workers finish.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  pool.reserve(width);
  for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gecrb
