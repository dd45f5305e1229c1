#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace fkpath {

// Worker count resolution: FKPATH_THREADS overrides the request (usually the
// config's `threads` key); hardware concurrency is the fallback.
int resolve_thread_count(int requested = 0);

// Evaluates fn(replica) for replica in [0, count) across `threads` workers and
// returns the results indexed by replica. Replicas own independent seed
// streams, so the output is identical for any thread count.
template <typename T, typename Fn>
std::vector<T> replica_map(int count, int threads, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  threads = std::min(std::max(threads, 1), std::max(count, 1));
  if (threads <= 1) {
    for (int r = 0; r < count; ++r) out[static_cast<std::size_t>(r)] = fn(r);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      try {
        for (int r = next.fetch_add(1); r < count && !failed.load(std::memory_order_relaxed);
             r = next.fetch_add(1)) {
          out[static_cast<std::size_t>(r)] = fn(r);
        }
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace fkpath
