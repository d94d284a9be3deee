#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gvortex {

/// Worker count used by parallel_for when none is given. Defaults to the
/// hardware concurrency; 0 restores that default.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Calls body(i) for i in [0, count). Results must be written to per-index
/// slots so the outcome does not depend on scheduling. If any call throws,
/// the exception from the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, unsigned threads = 0) {
  if (threads == 0) threads = thread_count();
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gvortex
