#include <cmath>

#include "respg/kernels.hpp"

namespace respg::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gemv(const double* w, const double* b, const double* x, double* y, std::size_t rows,
          std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = b[r] + dot(w + r * cols, x, cols);
}

void gemv_t_acc(const double* w, const double* g, double* out, std::size_t rows,
                std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double gr = g[r];
    const double* row = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * gr;
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void polyak(double rho, const double* main, double* target, std::size_t n) {
  const double keep = 1.0 - rho;
  for (std::size_t i = 0; i < n; ++i) target[i] = rho * target[i] + keep * main[i];
}

void adam_step(double* params, const double* grads, double* m, double* v, std::size_t n,
               const AdamCoeffs& c) {
  const double one_minus_b1 = 1.0 - c.beta1;
  const double one_minus_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c.bias_correction1;
    const double v_hat = v[i] / c.bias_correction2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace respg::kernels::scalar
