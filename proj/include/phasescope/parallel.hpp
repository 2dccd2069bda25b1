#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace phasescope {

namespace detail {
inline std::size_t& thread_override() {
  static std::size_t n = 0;
  return n;
}
inline bool& in_parallel_region() {
  static thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/// Worker count used by parallel loops. An explicit set_threads() wins over
/// the PHASESCOPE_THREADS environment variable.
inline std::size_t thread_count() {
  if (detail::thread_override() > 0) return detail::thread_override();
  if (const char* env = std::getenv("PHASESCOPE_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

inline void set_threads(std::size_t n) { detail::thread_override() = n; }

/// Runs fn(i) for i in [0, n) over contiguous chunks. Callers must only write
/// to slots owned by index i, so results do not depend on the worker count.
/// Nested calls run serially on the calling worker. The first exception
/// thrown by any worker is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  bool& inside = detail::in_parallel_region();
  std::size_t workers = inside ? 1 : std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn, &errors] {
      detail::in_parallel_region() = true;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace phasescope
