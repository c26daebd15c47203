// NEON (AArch64, float64x2) variants. Advanced SIMD is mandatory on AArch64,
// so no runtime probe is needed once this file is compiled in.

#include "kernels_internal.hpp"

#if RESPG_HAVE_NEON

#include <arm_neon.h>

#include <cmath>

namespace respg::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gemv(const double* w, const double* b, const double* x, double* y, std::size_t rows,
          std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = b[r] + dot(w + r * cols, x, cols);
}

void gemv_t_acc(const double* w, const double* g, double* out, std::size_t rows,
                std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const float64x2_t gr = vdupq_n_f64(g[r]);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2)
      vst1q_f64(out + c, vfmaq_f64(vld1q_f64(out + c), vld1q_f64(row + c), gr));
    for (; c < cols; ++c) out[c] += row[c] * g[r];
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void polyak(double rho, const double* main, double* target, std::size_t n) {
  const double keep = 1.0 - rho;
  const float64x2_t vr = vdupq_n_f64(rho);
  const float64x2_t vk = vdupq_n_f64(keep);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t = vmulq_f64(vr, vld1q_f64(target + i));
    const float64x2_t m = vmulq_f64(vk, vld1q_f64(main + i));
    vst1q_f64(target + i, vaddq_f64(t, m));
  }
  for (; i < n; ++i) target[i] = rho * target[i] + keep * main[i];
}

void adam_step(double* params, const double* grads, double* m, double* v, std::size_t n,
               const AdamCoeffs& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t omb1 = vdupq_n_f64(one_minus_b1);
  const float64x2_t omb2 = vdupq_n_f64(one_minus_b2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.lr);
  const float64x2_t eps = vdupq_n_f64(c.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grads + i);
    const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, g));
    const float64x2_t vi =
        vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(g, g)));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bc2)), eps);
    const float64x2_t step = vdivq_f64(vmulq_f64(lr, vdivq_f64(mi, bc1)), denom);
    vst1q_f64(params + i, vsubq_f64(vld1q_f64(params + i), step));
  }
  for (; i < n; ++i) {
    const double gi = grads[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * gi;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (gi * gi);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace respg::kernels::neon

#endif  // RESPG_HAVE_NEON
