#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace regdepth {

/// Resolves a worker request: 0 means one per hardware thread.
inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls body(task, worker) for task in [0, tasks), handing tasks out
/// dynamically. The first exception thrown by any task is rethrown.
template <class Body>
void parallel_for(std::size_t tasks, std::size_t workers, Body&& body) {
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(tasks, 1));
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) body(t, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (;;) {
        const std::size_t t = next.fetch_add(1);
        if (t >= tasks) return;
        try {
          body(t, w);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next.store(tasks);
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace regdepth
