#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace respg::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::Scalar,     scalar::dot,    scalar::gemv,
                                   scalar::gemv_t_acc, scalar::axpy, scalar::polyak,
                                   scalar::adam_step};

#if RESPG_HAVE_X86
constexpr KernelTable kAvx2Table{Isa::Avx2,       avx2::dot,    avx2::gemv,
                                 avx2::gemv_t_acc, avx2::axpy,  avx2::polyak,
                                 avx2::adam_step};

bool cpu_has_avx2_fma() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

#if RESPG_HAVE_NEON
constexpr KernelTable kNeonTable{Isa::Neon,       neon::dot,    neon::gemv,
                                 neon::gemv_t_acc, neon::axpy,  neon::polyak,
                                 neon::adam_step};
#endif

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{table_for(detect_isa())};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool parse_isa(std::string_view text, Isa& out) noexcept {
  if (text == "scalar") {
    out = Isa::Scalar;
  } else if (text == "avx2") {
    out = Isa::Avx2;
  } else if (text == "neon") {
    out = Isa::Neon;
  } else if (text == "auto") {
    out = detect_isa();
  } else {
    return false;
  }
  return true;
}

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return &kScalarTable;
    case Isa::Avx2:
#if RESPG_HAVE_X86
      return cpu_has_avx2_fma() ? &kAvx2Table : nullptr;
#else
      return nullptr;
#endif
    case Isa::Neon:
#if RESPG_HAVE_NEON
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Isa detect_isa() noexcept {
  if (const char* env = std::getenv("RESPG_ISA")) {
    Isa requested{};
    const std::string_view value(env);
    if (value != "auto" && parse_isa(value, requested) && table_for(requested) != nullptr)
      return requested;
  }
  if (table_for(Isa::Avx2) != nullptr) return Isa::Avx2;
  if (table_for(Isa::Neon) != nullptr) return Isa::Neon;
  return Isa::Scalar;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

Isa active_isa() noexcept { return active().isa; }

bool select_isa(Isa isa) noexcept {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

void polyak(double rho, std::span<const double> main, std::span<double> target) {
  active().polyak(rho, main.data(), target.data(),
                  main.size() < target.size() ? main.size() : target.size());
}

}  // namespace respg::kernels
