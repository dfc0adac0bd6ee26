#ifndef THERMOFORM_PARALLEL_HPP
#define THERMOFORM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace thermoform {

/// Worker count from THERMOFORM_THREADS, else the hardware concurrency.
inline int default_threads() {
  if (const char* env = std::getenv("THERMOFORM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// out[i] = f(i) for i < n. Each slot is written by exactly one worker, so
/// the result does not depend on scheduling. The first exception thrown by
/// any worker is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int threads, F f) {
  std::vector<T> out(n);
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(threads)));
  for (int i = 0; i < count; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace thermoform

#endif  // THERMOFORM_PARALLEL_HPP
