#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vxpc {

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown after all workers stop.
template<typename Fn>
void
parallelFor(std::size_t count, int threads, Fn&& fn)
{
  const std::size_t workers =
    std::min<std::size_t>(count, std::size_t(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; i++)
      fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex errorMutex;

  const auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(errorMutex);
        if (!error)
          error = std::current_exception();
        failed = true;
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; w++)
    pool.emplace_back(work);
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

}  // namespace vxpc
