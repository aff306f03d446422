#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lzeros/errors.hpp"
#include "lzeros/simd/term_sums.hpp"

using namespace lzeros::simd;

namespace {

// Compare the unscaled sums exp(shift) * value relative to the summed
// moduli. The shifts themselves may differ in the last bit because the
// vector kernel fuses the multiply-add.
void check_close(const TermSums& a, const TermSums& b) {
  REQUIRE(std::isfinite(a.shift));
  CHECK(std::abs(a.shift - b.shift) <= 1e-13 * (1.0 + std::abs(a.shift)));
  const double rb = std::exp(b.shift - a.shift);
  const double scale = std::max(a.magnitude, 1e-300);
  CHECK(std::abs(a.value - rb * b.value) <= 1e-12 * scale);
  CHECK(std::abs(a.moment - rb * b.moment) <= 1e-12 * scale * 8);
  CHECK(std::abs(a.magnitude - rb * b.magnitude) <= 1e-12 * scale);
}

}  // namespace

TEST_CASE("scalar kernel matches a direct sum") {
  std::vector<double> lw = {std::log(0.5), std::log(0.25), std::log(0.25)};
  std::vector<double> e = {0.0, 1.0, 2.0};
  const auto s = term_sums_scalar(lw, e, 0.3, 1.1);
  std::complex<double> direct = 0.0, moment = 0.0;
  for (int j = 0; j < 3; ++j) {
    const auto term = std::exp(std::complex<double>(lw[j] - e[j] * 0.3, -e[j] * 1.1));
    direct += term;
    moment += e[j] * term;
  }
  CHECK(std::abs(std::exp(s.shift) * s.value - direct) < 1e-15);
  CHECK(std::abs(std::exp(s.shift) * s.moment - moment) < 1e-15);
  CHECK(s.shift == doctest::Approx(std::log(0.5)));
}

TEST_CASE("empty input gives an empty sum") {
  const auto s = term_sums_scalar({}, {}, 0.0, 0.0);
  CHECK(s.shift == -std::numeric_limits<double>::infinity());
  CHECK(s.value == std::complex<double>(0.0, 0.0));
}

TEST_CASE("scalar is always available and selectable") {
  CHECK(isa_available(Isa::scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  set_active_isa(before);
}

#if defined(LZEROS_HAVE_AVX2)
TEST_CASE("avx2 kernel is equivalent to the scalar reference") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("CPU lacks AVX2/FMA; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ue(-3.0, 3.0), ul(-30.0, 0.0), ub(-40.0, 40.0), ut(-200.0, 200.0);
  // Sizes cover the vector body, the remainder loop and tiny inputs.
  for (int n : {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 101, 257, 1000}) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<double> lw(n), e(n);
      for (int j = 0; j < n; ++j) {
        lw[j] = ul(rng);
        e[j] = ue(rng);
      }
      const double beta = ub(rng), t = ut(rng);
      check_close(term_sums_scalar(lw, e, beta, t), term_sums_avx2(lw, e, beta, t));
    }
  }
}

TEST_CASE("avx2 kernel handles underflowing terms and large phases") {
  if (!isa_available(Isa::avx2)) return;
  std::vector<double> lw = {0.0, -800.0, -1e4, -20.0, 0.0};
  std::vector<double> e = {0.0, 1.0, 2.0, 3.0, 500.0};
  for (double t : {0.0, 1e3, 1e5, -7.5e4}) check_close(term_sums_scalar(lw, e, 0.0, t), term_sums_avx2(lw, e, 0.0, t));
}

TEST_CASE("dispatch follows the selected variant") {
  if (!isa_available(Isa::avx2)) return;
  std::vector<double> lw = {0.0, -1.0, -2.0}, e = {0.0, 1.0, 2.5};
  const Isa before = active_isa();
  set_active_isa(Isa::avx2);
  const auto a = term_sums(lw, e, 0.2, 3.0);
  set_active_isa(Isa::scalar);
  const auto b = term_sums(lw, e, 0.2, 3.0);
  set_active_isa(before);
  check_close(a, b);
}
#endif

TEST_CASE("extended and precise kernels agree with the scalar reference") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lw(1 + trial % 23), e(lw.size());
    for (std::size_t j = 0; j < lw.size(); ++j) {
      lw[j] = u(rng);
      e[j] = 4.0 * u(rng);
    }
    const double beta = u(rng), t = 10.0 * u(rng);
    check_close(term_sums_scalar(lw, e, beta, t), term_sums_extended(lw, e, beta, t));
    check_close(term_sums_scalar(lw, e, beta, t), term_sums_precise(lw, e, beta, t));
  }
}

TEST_CASE("precise kernel resolves a sum cancelled below double rounding") {
  // (1 + x)(1 + x^3) with x = exp(-i t) has a double zero at t = pi; its
  // modulus is 4 sin(h) sin(3 h) with h = (pi - t) / 2.
  const std::vector<double> lw = {0.0, 0.0, 0.0, 0.0};
  const std::vector<double> e = {0.0, 1.0, 3.0, 4.0};
  const double t = 3.141592653589793 - 1e-9;
  const long double h = (3.14159265358979323846264338327950288L - static_cast<long double>(t)) / 2;
  const double want = static_cast<double>(4.0L * std::sin(h) * std::sin(3.0L * h));
  const auto s = term_sums_precise(lw, e, 0.0, t);
  CHECK(s.shift == 0.0);
  CHECK(std::abs(std::abs(s.value) - want) <= 1e-8 * want);
}
