#pragma once

#include "respg/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define RESPG_HAVE_X86 1
#else
#define RESPG_HAVE_X86 0
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define RESPG_HAVE_NEON 1
#else
#define RESPG_HAVE_NEON 0
#endif

namespace respg::kernels {

#if RESPG_HAVE_X86
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* w, const double* b, const double* x, double* y, std::size_t rows,
          std::size_t cols);
void gemv_t_acc(const double* w, const double* g, double* out, std::size_t rows,
                std::size_t cols);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void polyak(double rho, const double* main, double* target, std::size_t n);
void adam_step(double* params, const double* grads, double* m, double* v, std::size_t n,
               const AdamCoeffs& c);
}  // namespace avx2
#endif

#if RESPG_HAVE_NEON
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* w, const double* b, const double* x, double* y, std::size_t rows,
          std::size_t cols);
void gemv_t_acc(const double* w, const double* g, double* out, std::size_t rows,
                std::size_t cols);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void polyak(double rho, const double* main, double* target, std::size_t n);
void adam_step(double* params, const double* grads, double* m, double* v, std::size_t n,
               const AdamCoeffs& c);
}  // namespace neon
#endif

}  // namespace respg::kernels
