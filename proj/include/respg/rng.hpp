#pragma once

#include <cstddef>
#include <cstdint>

namespace respg {

// Counter-based 64-bit generator: the n-th output is a pure function of
// (seed, stream, n), mixed with the SplitMix64 finalizer. Distributions are
// implemented here rather than through <random> so that sequences are
// identical across standard libraries.
class Rng {
 public:
  static constexpr const char* kName = "splitmix64-counter";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  // [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be > 0.
  std::size_t index(std::size_t n) noexcept;

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace respg
