#include "kernels_impl.hpp"

#if defined(FLOWCTL_HAVE_NEON)

#include <arm_neon.h>

#include <cmath>

namespace flowctl::kernels::detail {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void adam_neon(double* p, const double* g, double* m, double* v, std::size_t n, const AdamCoeffs& c) {
  const double step = c.lr / c.bias1;
  const double inv_bias2 = 1.0 / c.bias2;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    const float64x2_t mi =
        vaddq_f64(vmulq_n_f64(vld1q_f64(m + i), c.beta1), vmulq_n_f64(gi, 1.0 - c.beta1));
    const float64x2_t vi =
        vaddq_f64(vmulq_n_f64(vld1q_f64(v + i), c.beta2), vmulq_f64(vmulq_n_f64(gi, 1.0 - c.beta2), gi));
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vmulq_n_f64(vi, inv_bias2)), vdupq_n_f64(c.eps));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), vdivq_f64(vmulq_n_f64(mi, step), denom)));
  }
  for (; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    p[i] -= step * m[i] / (std::sqrt(v[i] * inv_bias2) + c.eps);
  }
}

}  // namespace flowctl::kernels::detail

#endif
