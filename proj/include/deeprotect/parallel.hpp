#pragma once

#include <atomic>
#include <cstdint>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace deeprotect {

// Execution policy for the data-parallel kernels. Every kernel has identical
// semantics under both policies; tests assert bit-for-bit equality where the
// kernel is designed for it (per-index RNG substreams, fixed-chunk
// reductions), and the benchmark tool compares their throughput.
enum class Exec { kSerial, kParallel };

inline bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {

// Captures the first exception thrown inside an OpenMP region so it can be
// rethrown after the region ends (exceptions must not escape a parallel
// loop). "First" is whichever thread wins the flag; all call sites treat any
// in-loop failure as fatal for the whole operation, so the choice is moot.
class ExceptionGuard {
 public:
  template <typename Fn>
  void run(Fn&& fn) noexcept {
    try {
      fn();
    } catch (...) {
      bool expected = false;
      if (armed_.compare_exchange_strong(expected, true)) {
        captured_ = std::current_exception();
      }
    }
  }

  void rethrow_if_any() {
    if (armed_.load() && captured_) std::rethrow_exception(captured_);
  }

 private:
  std::atomic<bool> armed_{false};
  std::exception_ptr captured_;
};

}  // namespace detail

// Runs fn(i) for i in [0, n). The parallel path requires fn to be safe to
// call concurrently for distinct i (all call sites write disjoint slices and
// draw randomness from per-index substreams). An exception thrown by any
// iteration aborts the operation and is rethrown to the caller.
template <typename Fn>
void for_each_index(std::int64_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::kParallel && openmp_enabled()) {
    detail::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      guard.run([&] { fn(i); });
    }
    guard.rethrow_if_any();
  } else {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
  }
}

// Splits [0, n) into exactly n_chunks contiguous ranges (some possibly empty)
// and runs fn(chunk, begin, end) for each. The chunk count is fixed by the
// caller — never derived from the thread count — so a reduction that sums
// per-chunk partials in chunk order gives the same floating-point result no
// matter how many threads executed the chunks.
template <typename Fn>
void for_chunks(std::int64_t n, int n_chunks, Exec exec, Fn&& fn) {
  auto bound = [&](int c) -> std::int64_t {
    return n * c / n_chunks;
  };
  if (exec == Exec::kParallel && openmp_enabled()) {
    detail::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n_chunks; ++c) {
      guard.run([&] { fn(c, bound(c), bound(c + 1)); });
    }
    guard.rethrow_if_any();
  } else {
    for (int c = 0; c < n_chunks; ++c) fn(c, bound(c), bound(c + 1));
  }
}

}  // namespace deeprotect
