#pragma once

// Dense float64 inner loops used by the networks and optimizers.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, a vector implementation (AVX2 on x86-64, NEON on AArch64).
// The active table is chosen once at startup from CPU features and can be
// pinned with select_isa() or the RESPG_ISA environment variable
// ("scalar", "avx2", "neon").
//
// Elementwise kernels (axpy, polyak, adam_step) produce bit-identical results
// on every ISA. Reductions (dot, gemv, gemv_t_acc) reassociate sums and may
// differ from the scalar path in the last few ulps.

#include <cstddef>
#include <span>
#include <string_view>

namespace respg::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct AdamCoeffs {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[r] = b[r] + sum_c w[r*cols + c] * x[c]
  void (*gemv)(const double* w, const double* b, const double* x, double* y,
               std::size_t rows, std::size_t cols);
  // out[c] += sum_r w[r*cols + c] * g[r]
  void (*gemv_t_acc)(const double* w, const double* g, double* out,
                     std::size_t rows, std::size_t cols);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // target = rho * target + (1 - rho) * main
  void (*polyak)(double rho, const double* main, double* target, std::size_t n);
  void (*adam_step)(double* params, const double* grads, double* m, double* v,
                    std::size_t n, const AdamCoeffs& c);
};

// Table for a specific ISA; returns nullptr when that ISA was not compiled in
// or is not supported by the running CPU.
const KernelTable* table_for(Isa isa) noexcept;

// Best ISA available on this machine, honouring RESPG_ISA when set.
Isa detect_isa() noexcept;

const KernelTable& active() noexcept;
Isa active_isa() noexcept;

// Returns false (and leaves the selection unchanged) if unavailable.
bool select_isa(Isa isa) noexcept;

// Parses "scalar" / "avx2" / "neon" / "auto".
bool parse_isa(std::string_view text, Isa& out) noexcept;

// Span conveniences over the active table.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void polyak(double rho, std::span<const double> main, std::span<double> target);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* w, const double* b, const double* x, double* y, std::size_t rows,
          std::size_t cols);
void gemv_t_acc(const double* w, const double* g, double* out, std::size_t rows,
                std::size_t cols);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void polyak(double rho, const double* main, double* target, std::size_t n);
void adam_step(double* params, const double* grads, double* m, double* v, std::size_t n,
               const AdamCoeffs& c);
}  // namespace scalar

}  // namespace respg::kernels
