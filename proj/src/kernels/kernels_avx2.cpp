#include "delaysync/kernels.hpp"

#if defined(DELAYSYNC_HAVE_AVX2)

#include <immintrin.h>

namespace delaysync::kernels::avx2 {

namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = horizontal_sum(
      _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d s = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(s, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(s, _mm256_loadu_pd(x + i + 4),
                                                _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(s, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(std::size_t rows, std::size_t cols, double alpha, const double* a,
          const double* x, double beta, double* y) {
  if (beta == 0.0) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  } else if (beta != 1.0) {
    for (std::size_t i = 0; i < rows; ++i) y[i] *= beta;
  }
  std::size_t j = 0;
  // Four columns per sweep over y.
  for (; j + 4 <= cols; j += 4) {
    const double s0 = alpha * x[j];
    const double s1 = alpha * x[j + 1];
    const double s2 = alpha * x[j + 2];
    const double s3 = alpha * x[j + 3];
    const double* c0 = a + j * rows;
    const double* c1 = c0 + rows;
    const double* c2 = c1 + rows;
    const double* c3 = c2 + rows;
    const __m256d v0 = _mm256_set1_pd(s0);
    const __m256d v1 = _mm256_set1_pd(s1);
    const __m256d v2 = _mm256_set1_pd(s2);
    const __m256d v3 = _mm256_set1_pd(s3);
    std::size_t i = 0;
    for (; i + 4 <= rows; i += 4) {
      __m256d acc = _mm256_loadu_pd(y + i);
      acc = _mm256_fmadd_pd(v0, _mm256_loadu_pd(c0 + i), acc);
      acc = _mm256_fmadd_pd(v1, _mm256_loadu_pd(c1 + i), acc);
      acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(c2 + i), acc);
      acc = _mm256_fmadd_pd(v3, _mm256_loadu_pd(c3 + i), acc);
      _mm256_storeu_pd(y + i, acc);
    }
    for (; i < rows; ++i) {
      y[i] += s0 * c0[i] + s1 * c1[i] + s2 * c2[i] + s3 * c3[i];
    }
  }
  for (; j < cols; ++j) {
    axpy(alpha * x[j], a + j * rows, y, rows);
  }
}

}  // namespace delaysync::kernels::avx2

#endif  // DELAYSYNC_HAVE_AVX2
