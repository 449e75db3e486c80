#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace attrspace {

// sq_dist is THE distance kernel. Every code path that ranks points by
// Euclidean distance (brute force, kd-tree, blocked scan, init scoring,
// quality) must call this function so that squared distances are
// bit-identical everywhere. Sixteen accumulator chains (lane j sums dims
// i+j mod 16) with the fixed reduction tree
//   g_k = (s_{4k} + s_{4k+1}) + (s_{4k+2} + s_{4k+3})
//   ((g0 + g1) + (g2 + g3)) + tail
// The AVX2 variant keeps the same chains in vector lanes and reduces in
// the same order, so the two paths agree bit for bit (tested).
inline double sq_dist_scalar(const double* a, const double* b, std::size_t d) {
  double s[16] = {0.0};
  std::size_t i = 0;
  for (; i + 16 <= d; i += 16) {
    for (int j = 0; j < 16; ++j) {
      const double t = a[i + j] - b[i + j];
      s[j] += t * t;
    }
  }
  double tail = 0.0;
  for (; i < d; ++i) {
    const double t = a[i] - b[i];
    tail += t * t;
  }
  const double g0 = (s[0] + s[1]) + (s[2] + s[3]);
  const double g1 = (s[4] + s[5]) + (s[6] + s[7]);
  const double g2 = (s[8] + s[9]) + (s[10] + s[11]);
  const double g3 = (s[12] + s[13]) + (s[14] + s[15]);
  return ((g0 + g1) + (g2 + g3)) + tail;
}

#if defined(__AVX2__)
inline double sq_dist(const double* a, const double* b, std::size_t d) {
  __m256d v0 = _mm256_setzero_pd(), v1 = v0, v2 = v0, v3 = v0;
  std::size_t i = 0;
  for (; i + 16 <= d; i += 16) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8));
    const __m256d d3 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12));
    v0 = _mm256_add_pd(v0, _mm256_mul_pd(d0, d0));
    v1 = _mm256_add_pd(v1, _mm256_mul_pd(d1, d1));
    v2 = _mm256_add_pd(v2, _mm256_mul_pd(d2, d2));
    v3 = _mm256_add_pd(v3, _mm256_mul_pd(d3, d3));
  }
  double tail = 0.0;
  for (; i < d; ++i) {
    const double t = a[i] - b[i];
    tail += t * t;
  }
  alignas(32) double s[16];
  _mm256_store_pd(s, v0);
  _mm256_store_pd(s + 4, v1);
  _mm256_store_pd(s + 8, v2);
  _mm256_store_pd(s + 12, v3);
  const double g0 = (s[0] + s[1]) + (s[2] + s[3]);
  const double g1 = (s[4] + s[5]) + (s[6] + s[7]);
  const double g2 = (s[8] + s[9]) + (s[10] + s[11]);
  const double g3 = (s[12] + s[13]) + (s[14] + s[15]);
  return ((g0 + g1) + (g2 + g3)) + tail;
}
#else
inline double sq_dist(const double* a, const double* b, std::size_t d) {
  return sq_dist_scalar(a, b, d);
}
#endif

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  return sq_dist(a.data(), b.data(), a.size());
}

inline double euclid(const double* a, const double* b, std::size_t d) {
  return std::sqrt(sq_dist(a, b, d));
}

inline double euclid(std::span<const double> a, std::span<const double> b) {
  return euclid(a.data(), b.data(), a.size());
}

inline double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const double* a, std::size_t d) {
  return std::sqrt(dot(a, a, d));
}

inline double norm2(std::span<const double> a) { return norm2(a.data(), a.size()); }

/// Row-major dense matrix of doubles. Small utility type shared by the
/// samplers, the trainer and the analysis code.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double* row(std::size_t i) { return a.data() + i * cols; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

/// Arithmetic mean of selected rows, summed in the order given.
/// Callers that need a canonical result pass ordinals in ascending order.
template <typename Index>
inline std::vector<double> mean_rows(const double* data, std::size_t cols,
                                     const std::vector<Index>& ordinals) {
  std::vector<double> m(cols, 0.0);
  for (Index o : ordinals) {
    const double* r = data + static_cast<std::size_t>(o) * cols;
    for (std::size_t j = 0; j < cols; ++j) m[j] += r[j];
  }
  const double inv = 1.0 / static_cast<double>(ordinals.size());
  for (std::size_t j = 0; j < cols; ++j) m[j] *= inv;
  return m;
}

}  // namespace attrspace
