// AVX2 variants. Compiled with per-function target attributes so the rest of
// the library keeps the baseline ISA; only reached after a CPUID check.

#include "kernels_internal.hpp"

#if RESPG_HAVE_X86

#include <immintrin.h>

#include <cmath>

#define RESPG_AVX2 __attribute__((target("avx2")))
#define RESPG_AVX2_FMA __attribute__((target("avx2,fma")))

namespace respg::kernels::avx2 {

namespace {

RESPG_AVX2_FMA inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

RESPG_AVX2_FMA double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

RESPG_AVX2_FMA void gemv(const double* w, const double* b, const double* x, double* y,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = b[r] + dot(w + r * cols, x, cols);
}

RESPG_AVX2_FMA void gemv_t_acc(const double* w, const double* g, double* out,
                               std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const __m256d gr = _mm256_set1_pd(g[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d o = _mm256_loadu_pd(out + c);
      _mm256_storeu_pd(out + c, _mm256_fmadd_pd(_mm256_loadu_pd(row + c), gr, o));
    }
    for (; c < cols; ++c) out[c] += row[c] * g[r];
  }
}

RESPG_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

RESPG_AVX2 void polyak(double rho, const double* main, double* target, std::size_t n) {
  const double keep = 1.0 - rho;
  const __m256d vr = _mm256_set1_pd(rho);
  const __m256d vk = _mm256_set1_pd(keep);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vr, _mm256_loadu_pd(target + i));
    const __m256d m = _mm256_mul_pd(vk, _mm256_loadu_pd(main + i));
    _mm256_storeu_pd(target + i, _mm256_add_pd(t, m));
  }
  for (; i < n; ++i) target[i] = rho * target[i] + keep * main[i];
}

RESPG_AVX2 void adam_step(double* params, const double* grads, double* m, double* v,
                          std::size_t n, const AdamCoeffs& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d omb1 = _mm256_set1_pd(one_minus_b1);
  const __m256d omb2 = _mm256_set1_pd(one_minus_b2);
  const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
  const __m256d lr = _mm256_set1_pd(c.lr);
  const __m256d eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grads + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(omb1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bc1);
    const __m256d v_hat = _mm256_div_pd(vi, bc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, m_hat), denom);
    _mm256_storeu_pd(params + i, _mm256_sub_pd(_mm256_loadu_pd(params + i), step));
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

}  // namespace respg::kernels::avx2

#endif  // RESPG_HAVE_X86
