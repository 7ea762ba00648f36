#ifndef INFPROJ_PARALLEL_HPP
#define INFPROJ_PARALLEL_HPP

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <thread>
#include <vector>

namespace infproj {

// INFPROJ_THREADS caps internal parallelism; defaults to the hardware count.
inline unsigned max_threads() {
  static const unsigned cached = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char *env = std::getenv("INFPROJ_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return std::min(hw, 64u);
  }();
  return cached;
}

// Parallel loop over fixed-size chunks of [0, n). The chunk grid is
// independent of the thread count and partial results are combined by the
// caller in chunk order, so reductions are bit-identical for any thread cap.
template <class ChunkFn>
void for_chunks(std::size_t n, std::size_t chunk_size, ChunkFn &&fn) {
  if (n == 0) return;
  const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(max_threads(), n_chunks));
  if (workers <= 1 || n < 2 * chunk_size) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < n_chunks; c += workers)
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    });
  }
  for (std::thread &t : pool) t.join();
}

inline double process_cpu_seconds() {
#if defined(CLOCK_PROCESS_CPUTIME_ID)
  timespec ts;
  if (clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts) == 0)
    return static_cast<double>(ts.tv_sec) + 1e-9 * ts.tv_nsec;
#endif
  return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

// Nanosecond-granularity monotonic clock for per-block timing; the process
// CPU clock on some kernels is quantized at ~10 ms and costs a syscall.
inline double fine_clock_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace infproj

#endif
