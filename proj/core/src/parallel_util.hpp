#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sinrkit {
namespace internal {

// Evaluates `fn(i)` for i in [0, count) across up to `workers` threads and
// returns the results in index order. `fn` must be safe to call concurrently.
// The first exception thrown by any invocation is rethrown on the caller's
// thread after all workers join.
inline std::vector<double> parallel_map_indexed(
    std::size_t count, int workers, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(count, 0.0);
  if (count == 0) return out;
  std::size_t n_threads = workers > 1 ? static_cast<std::size_t>(workers) : 1;
  if (n_threads > count) n_threads = count;
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw > 0 && n_threads > hw) n_threads = hw;

  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_stripe = [&](std::size_t start) {
    try {
      for (std::size_t i = start; i < count; i += n_threads) out[i] = fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_threads - 1);
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(run_stripe, t);
  run_stripe(0);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace internal
}  // namespace sinrkit
