#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace crystalpr {

/// Worker count from CRYSTALPR_THREADS, or 1.
inline unsigned default_threads()
{
  if (const char* env = std::getenv("CRYSTALPR_THREADS")) {
    try {
      int t = std::stoi(env);
      if (t > 0) return static_cast<unsigned>(t);
    } catch (...) {
    }
  }
  return 1;
}

/// Runs f(i) for i in [0, n) on up to `threads` workers.  Callers write
/// results into slot i, so the output never depends on the schedule.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f)
{
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace crystalpr
