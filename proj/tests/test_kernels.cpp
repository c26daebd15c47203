#include <cmath>
#include <vector>

#include "doctest.h"
#include "respg/kernels.hpp"
#include "respg/rng.hpp"

using namespace respg;
using namespace respg::kernels;

namespace {

std::vector<double> randv(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (const auto* t = table_for(isa)) out.push_back(t);
  return out;
}

// Sizes that exercise full vectors, remainders and the empty case.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 50, 51, 64, 100, 257};

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar table is always available") {
    const auto* s = table_for(Isa::Scalar);
    REQUIRE(s != nullptr);
    CHECK(s->isa == Isa::Scalar);
    Isa parsed{};
    CHECK(parse_isa("scalar", parsed));
    CHECK(parsed == Isa::Scalar);
    CHECK(parse_isa("avx2", parsed));
    CHECK(parsed == Isa::Avx2);
    CHECK_FALSE(parse_isa("sse9", parsed));
    CHECK(isa_name(Isa::Neon) == "neon");
  }

  TEST_CASE("select_isa switches and restores the active table") {
    const Isa before = active_isa();
    CHECK(select_isa(Isa::Scalar));
    CHECK(active_isa() == Isa::Scalar);
    CHECK(active().isa == Isa::Scalar);
    CHECK(select_isa(before));
    CHECK(active_isa() == before);
  }

  TEST_CASE("scalar kernels match naive loops") {
    Rng rng(1);
    const auto a = randv(rng, 13), b = randv(rng, 13);
    double d = 0.0;
    for (std::size_t i = 0; i < 13; ++i) d += a[i] * b[i];
    CHECK(scalar::dot(a.data(), b.data(), 13) == doctest::Approx(d).epsilon(1e-14));

    const std::size_t rows = 3, cols = 5;
    const auto w = randv(rng, rows * cols), bias = randv(rng, rows), x = randv(rng, cols), g = randv(rng, rows);
    std::vector<double> y(rows);
    scalar::gemv(w.data(), bias.data(), x.data(), y.data(), rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = bias[r];
      for (std::size_t c = 0; c < cols; ++c) s += w[r * cols + c] * x[c];
      CHECK(y[r] == doctest::Approx(s).epsilon(1e-14));
    }
    std::vector<double> acc(cols, 1.0);
    scalar::gemv_t_acc(w.data(), g.data(), acc.data(), rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 1.0;
      for (std::size_t r = 0; r < rows; ++r) s += w[r * cols + c] * g[r];
      CHECK(acc[c] == doctest::Approx(s).epsilon(1e-14));
    }

    std::vector<double> t = {0.0, 10.0};
    const std::vector<double> m = {1.0, 0.0};
    scalar::polyak(0.99, m.data(), t.data(), 2);
    CHECK(t[0] == doctest::Approx(0.01));
    CHECK(t[1] == doctest::Approx(9.9));
  }

  TEST_CASE("vector elementwise kernels are bit-identical to scalar") {
    Rng rng(2);
    for (const auto* t : vector_tables()) {
      CAPTURE(isa_name(t->isa));
      for (std::size_t n : kSizes) {
        const auto x = randv(rng, n);
        auto y1 = randv(rng, n);
        auto y2 = y1;
        const double alpha = rng.normal();
        scalar::axpy(alpha, x.data(), y1.data(), n);
        t->axpy(alpha, x.data(), y2.data(), n);
        CHECK(y1 == y2);

        auto p1 = randv(rng, n);
        auto p2 = p1;
        scalar::polyak(0.99, x.data(), p1.data(), n);
        t->polyak(0.99, x.data(), p2.data(), n);
        CHECK(p1 == p2);

        auto params1 = randv(rng, n), m1 = randv(rng, n, 0.1), v1 = randv(rng, n, 0.1);
        for (auto& v : v1) v = std::abs(v);
        auto params2 = params1, m2 = m1, v2 = v1;
        const auto g = randv(rng, n);
        const AdamCoeffs c{1e-3, 0.9, 0.999, 1e-8, 1 - 0.9 * 0.9 * 0.9, 1 - 0.999 * 0.999 * 0.999};
        scalar::adam_step(params1.data(), g.data(), m1.data(), v1.data(), n, c);
        t->adam_step(params2.data(), g.data(), m2.data(), v2.data(), n, c);
        CHECK(params1 == params2);
        CHECK(m1 == m2);
        CHECK(v1 == v2);
      }
    }
  }

  TEST_CASE("vector reductions agree with scalar to rounding") {
    Rng rng(3);
    for (const auto* t : vector_tables()) {
      CAPTURE(isa_name(t->isa));
      for (std::size_t n : kSizes) {
        const auto a = randv(rng, n), b = randv(rng, n);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
        CHECK(std::abs(t->dot(a.data(), b.data(), n) - scalar::dot(a.data(), b.data(), n)) <=
              1e-12 * std::max(1.0, mag));

        for (std::size_t rows : {std::size_t{1}, std::size_t{3}, std::size_t{50}}) {
          const auto w = randv(rng, rows * n), bias = randv(rng, rows), x = randv(rng, n), g = randv(rng, rows);
          std::vector<double> y1(rows), y2(rows);
          scalar::gemv(w.data(), bias.data(), x.data(), y1.data(), rows, n);
          t->gemv(w.data(), bias.data(), x.data(), y2.data(), rows, n);
          for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(y1[r] - y2[r]) <= 1e-12 * (1.0 + std::abs(y1[r]) + n));
          std::vector<double> o1(n, 0.5), o2(n, 0.5);
          scalar::gemv_t_acc(w.data(), g.data(), o1.data(), rows, n);
          t->gemv_t_acc(w.data(), g.data(), o2.data(), rows, n);
          for (std::size_t c = 0; c < n; ++c) CHECK(std::abs(o1[c] - o2[c]) <= 1e-12 * (1.0 + std::abs(o1[c]) + rows));
        }
      }
    }
  }

  TEST_CASE("span helpers dispatch to the active table") {
    Rng rng(4);
    const auto a = randv(rng, 20), b = randv(rng, 20);
    CHECK(dot(a, b) == doctest::Approx(scalar::dot(a.data(), b.data(), 20)).epsilon(1e-13));
    auto y = b;
    axpy(2.0, a, y);
    for (std::size_t i = 0; i < 20; ++i) CHECK(y[i] == b[i] + 2.0 * a[i]);
  }
}
