// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after the runtime CPU check.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "polyfk/kernels.hpp"

namespace polyfk::kernels::detail {

double dot_avx2(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i + 4]), _mm256_loadu_pd(&y[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i)
    s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]));
    _mm256_storeu_pd(&y[i], r);
  }
  for (; i < n; ++i)
    y[i] += a * x[i];
}

void scal_avx2(double a, std::span<double> y) {
  const std::size_t n = y.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(&y[i], _mm256_mul_pd(va, _mm256_loadu_pd(&y[i])));
  for (; i < n; ++i)
    y[i] *= a;
}

void rank1_avx2(double *A, int m, int n, double alpha, const double *u, const double *v) {
  for (int i = 0; i < m; ++i) {
    const __m256d au = _mm256_set1_pd(alpha * u[i]);
    double *row = A + static_cast<std::size_t>(i) * n;
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d r = _mm256_fmadd_pd(au, _mm256_loadu_pd(&v[j]), _mm256_loadu_pd(&row[j]));
      _mm256_storeu_pd(&row[j], r);
    }
    const double s = alpha * u[i];
    for (; j < n; ++j)
      row[j] += s * v[j];
  }
}

void spmv_avx2(int n_rows, const int *row_ptr, const int *cols, const double *vals,
               const double *x, double *y) {
  for (int i = 0; i < n_rows; ++i) {
    const int begin = row_ptr[i], end = row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    int k = begin;
    for (; k + 4 <= end; k += 4) {
      const __m256d xv = _mm256_set_pd(x[cols[k + 3]], x[cols[k + 2]], x[cols[k + 1]], x[cols[k]]);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(&vals[k]), xv, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; k < end; ++k)
      s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

} // namespace polyfk::kernels::detail

#endif
