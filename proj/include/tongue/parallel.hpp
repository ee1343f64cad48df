#ifndef TONGUE_PARALLEL_HPP
#define TONGUE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tongue {

/// Worker count: TONGUE_ATLAS_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("TONGUE_ATLAS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on `threads` workers. Each index is
/// handled exactly once; callers write results to slot i, so the output
/// does not depend on scheduling.
template <class Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max(count, 1)));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tongue

#endif  // TONGUE_PARALLEL_HPP
