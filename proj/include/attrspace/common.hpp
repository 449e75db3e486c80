#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace attrspace {

// Error taxonomy maps 1:1 onto CLI exit codes (see tools/).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;  // exit code 2
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;  // exit code 1
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;  // exit code 3
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

/// Thread count resolution: explicit value > ATTRSPACE_THREADS env > 1.
/// 1 is the default on purpose; it is the bit-reproducible mode.
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ATTRSPACE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

/// Static-partition parallel_for. Each worker owns a contiguous index
/// range, so writes into per-index slots never race and results do not
/// depend on the thread count.
inline void parallel_for(std::size_t begin, std::size_t end, std::size_t threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t n = end > begin ? end - begin : 0;
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    body(begin, end);
    return;
  }
  const std::size_t workers = std::min(threads, n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace attrspace
