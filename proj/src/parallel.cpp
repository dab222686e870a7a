#include "robust/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace robust {

int resolve_threads(int requested) {
  if (requested >= 1) return requested;
  if (const char* env = std::getenv("ROBUST_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  const int tc = static_cast<int>(
      std::min<std::int64_t>(n, std::max(1, threads)));
  if (tc == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex guard;
  std::vector<std::thread> pool;
  pool.reserve(tc);
  for (int t = 0; t < tc; ++t) {
    const std::int64_t lo = n * t / tc;
    const std::int64_t hi = n * (t + 1) / tc;
    pool.emplace_back([&, lo, hi] {
      for (std::int64_t i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(guard);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(const double* xs, std::int64_t n) {
  if (n <= 0) return 0.0;
  if (n <= 16) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += xs[i];
    return s;
  }
  const std::int64_t half = n / 2;
  return pairwise_sum(xs, half) + pairwise_sum(xs + half, n - half);
}

}  // namespace robust
