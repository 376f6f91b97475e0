#pragma once

#include <sqbath/error.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sqbath {

/// Worker count: explicit request if > 0, else SQBATH_THREADS, else 1.
inline unsigned resolve_threads(int requested = 0) {
  if (requested > 0) {
    return static_cast<unsigned>(requested);
  }
  if (const char* env = std::getenv("SQBATH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) {
      throw ConfigError(std::string("SQBATH_THREADS must be a positive integer, got '") + env +
                        "'");
    }
    return static_cast<unsigned>(v);
  }
  return 1;
}

/// Calls f(i) for i in [0, n) on up to `threads` workers. Work items are
/// independent and write only to their own output slot, so results do not
/// depend on the worker count. The first exception thrown is rethrown.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      f(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace sqbath
