// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace flowctl::kernels::detail {

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void adam_avx2(double* p, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c) {
  const double step = c.lr / c.bias1;
  const double inv_bias2 = 1.0 / c.bias2;
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b1c = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d b2c = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d vinv = _mm256_set1_pd(inv_bias2);
  const __m256d veps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(b1c, gi));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(_mm256_mul_pd(b2c, gi), gi));
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vinv)), veps);
    const __m256d upd = _mm256_div_pd(_mm256_mul_pd(vstep, mi), denom);
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), upd));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    p[i] -= step * m[i] / (std::sqrt(v[i] * inv_bias2) + c.eps);
  }
}

}  // namespace flowctl::kernels::detail
