#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cli {

// Run fn(i) for i in [0, count) on up to `jobs` threads. Callers write into
// index-addressed result slots, so the output order never depends on the
// schedule. The first exception wins and is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t jobs, std::size_t count, const Fn& fn) {
  if (count == 0) return;
  if (jobs <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads = jobs < count ? jobs : count;
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t w = 0; w < n_threads; ++w) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cli
