#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace spde {

inline int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Evaluates fn(r) for r in [0, count) across threads.  Each result lands in
/// its own slot and any reduction happens afterwards in index order, so the
/// thread count changes wall time only, never values.
template <class T, class Fn>
std::vector<T> run_replicates(int count, int threads, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  const int nthreads = std::min(effective_threads(threads), count > 0 ? count : 1);
  if (nthreads <= 1) {
    for (int r = 0; r < count; ++r) out[static_cast<std::size_t>(r)] = fn(r);
    return out;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= count || failed.load()) return;
        try {
          out[static_cast<std::size_t>(r)] = fn(r);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace spde
