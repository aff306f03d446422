#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "lzeros/amplitude.hpp"
#include "lzeros/envelope.hpp"
#include "lzeros/errors.hpp"
#include "lzeros/two_band.hpp"
#include "lzeros/zero_finder.hpp"

using namespace lzeros;

namespace {

constexpr double kPi = std::numbers::pi;

double phase_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

SearchWindow window(double b0, double b1, double t0, double t1) {
  SearchWindow w;
  w.beta_min = b0;
  w.beta_max = b1;
  w.t_min = t0;
  w.t_max = t1;
  return w;
}

}  // namespace

TEST_CASE("Ising dispersion") {
  CHECK(ising_dispersion(1e-9, 0.25) < 1e-8);
  for (double h : {0.1, 0.3, 0.8}) CHECK(ising_dispersion(kPi / 2, h) == doctest::Approx(std::sqrt(16 * h * h + 1)));
  CHECK(ising_dispersion(kPi, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("Bogoliubov coefficients are normalized") {
  const auto b = bogoliubov(kPi, 0.5);
  CHECK(std::abs(b.u - 1.0) < 1e-14);
  CHECK(std::abs(b.v) < 1e-14);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uq(0.01, kPi - 0.01), uh(-2.0, 2.0), ug(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double q = uq(rng), h = uh(rng), g = ug(rng);
    const auto c = bogoliubov(q, h);
    CHECK(std::norm(c.u) + std::norm(c.v) == doctest::Approx(1.0).epsilon(1e-14));
    if (std::abs(g) > 1e-3) {
      const auto x = xy_bogoliubov(q, g, h);
      CHECK(std::norm(x.u) + std::norm(x.v) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  const auto far = bogoliubov(1.0, 1e6);
  CHECK(std::abs(far.u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(far.v) < 1e-6);
  CHECK_THROWS_AS(bogoliubov(0.0, 0.25), GaplessMode);
}

TEST_CASE("excitation amplitudes") {
  for (double q : allowed_momenta(12)) CHECK(std::abs(excitation_amplitude(q, 0.3, 0.3)) < 1e-15);
  const auto short_q = ising_modes(10, 0.1, 0.2);
  for (const auto& m : short_q.modes) CHECK(std::abs(m.Z) < 1.0);
  const auto long_q = ising_modes(10, 0.1, 0.5);
  int above = 0, below = 0;
  for (const auto& m : long_q.modes) (std::abs(m.Z) > 1.0 ? above : below)++;
  CHECK(above > 0);
  CHECK(below > 0);
  for (const auto& m : long_q.modes) CHECK(m.W == doctest::Approx(std::log(std::abs(m.Z)) / m.eps_f));
}

TEST_CASE("allowed momenta are odd multiples of pi / N") {
  const auto q = allowed_momenta(10);
  REQUIRE(q.size() == 5);
  for (std::size_t m = 0; m < 5; ++m) CHECK(q[m] == doctest::Approx((2.0 * m + 1) * kPi / 10));
  CHECK_THROWS_AS(allowed_momenta(7), InvalidArgument);
}

TEST_CASE("BCS populations") {
  const auto quench = ising_modes(10, 0.1, 0.5);
  const auto d = bcs_populations(quench);
  CHECK(d.size() == 32);
  double total = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) total += d.population(j);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.energy(0) == 0.0);
  const auto s = bcs_populations(ising_modes(10, 0.1, 0.2));
  for (std::size_t j = 1; j < s.size(); ++j) CHECK(s.population(j) < s.population(0));
  CHECK_THROWS_AS(bcs_populations(ising_modes(2 * kSubsetModeCap + 2, 0.1, 0.2)), SizeCap);
}

TEST_CASE("factorized amplitude equals the subset sum") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ub(-3.0, 3.0), ut(0.0, 60.0);
  for (auto [hi, hf] : {std::pair{0.1, 0.2}, {0.1, 0.5}, {0.4, 0.05}}) {
    const auto quench = ising_modes(24, hi, hf);
    const auto d = bcs_populations(quench);
    for (int i = 0; i < 40; ++i) {
      const ComplexTime z{ub(rng), ut(rng)};
      const auto f = factorized_amplitude(quench, z);
      const auto e = evaluate(d, z);
      CHECK(std::abs(f.log_modulus - e.log_modulus) < 1e-10);
      CHECK(phase_gap(f.phase, e.phase) < 1e-9);
    }
    const auto one = factorized_amplitude(quench, {0.0, 0.0});
    CHECK(std::abs(one.log_modulus) < 1e-14);
  }
  const auto id = ising_modes(10, 0.3, 0.3);
  for (double t : {0.5, 3.0, 17.0}) CHECK(std::abs(factorized_amplitude(id, {0.0, t}).log_modulus) < 1e-14);
}

TEST_CASE("BCS envelope equals the generic hull") {
  for (auto [hi, hf] : {std::pair{0.1, 0.2}, {0.1, 0.5}, {0.05, 0.9}, {0.6, 0.2}}) {
    const auto quench = ising_modes(10, hi, hf);
    const auto d = bcs_populations(quench);
    const auto bcs = bcs_envelope(quench);
    const auto hull = compute_envelope(d);
    CHECK(bcs.members == hull.members);
  }
  const auto short_env = bcs_envelope(ising_modes(10, 0.1, 0.2));
  for (const auto& s : short_env.segments) CHECK(s.beta < 0.0);
  const auto long_env = bcs_envelope(ising_modes(10, 0.1, 0.5));
  bool positive = false;
  for (const auto& s : long_env.segments) positive = positive || s.beta > 0.0;
  CHECK(positive);
}

TEST_CASE("W ordering drives the envelope") {
  const auto quench = ising_modes(12, 0.1, 0.5);
  const auto order = w_order(quench);
  for (std::size_t k = 1; k < order.size(); ++k) CHECK(quench.modes[order[k - 1]].W >= quench.modes[order[k]].W);
  const auto env = bcs_envelope(quench);
  REQUIRE(env.segments.size() == order.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    CHECK(env.member_energies[k + 1] - env.member_energies[k] ==
          doctest::Approx(quench.modes[order[k]].pair_energy).epsilon(1e-12));
}

TEST_CASE("analytic zeros equal the envelope chains") {
  for (auto [hi, hf] : {std::pair{0.1, 0.2}, {0.1, 0.5}}) {
    const auto quench = ising_modes(10, hi, hf);
    const auto w = window(-200.1, 60.3, 0.013, 200.7);
    const auto analytic = bcs_zeros(quench, w);
    const auto approx = approximate_zeros(bcs_envelope(quench), w);
    REQUIRE(analytic.size() == approx.size());
    REQUIRE(analytic.size() > 10);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      CHECK(std::abs(analytic.zeros[i].z.beta - approx.zeros[i].z.beta) < 1e-9);
      CHECK(std::abs(analytic.zeros[i].z.t - approx.zeros[i].z.t) < 1e-9);
    }
  }
}

TEST_CASE("analytic zeros match the exact finder") {
  const auto quench = ising_modes(10, 0.1, 0.5);
  auto w = window(-2.03, 2.07, 0.05, 30.3);
  w.target_resolution = 1e-7;
  const auto analytic = bcs_zeros(quench, w);
  const auto exact = find_zeros(factorized_function(quench), w);
  REQUIRE(analytic.size() == exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    CHECK(std::abs(analytic.zeros[i].z.beta - exact.zeros[i].z.beta) < 1e-6);
    CHECK(std::abs(analytic.zeros[i].z.t - exact.zeros[i].z.t) < 1e-6);
  }
}

TEST_CASE("unit modulus mode sits on the real-time axis") {
  // Take a mode with |Z| > 1 after the 0.1 -> 0.5 quench and bisect h_f down to |Z| = 1.
  const int N = 10;
  const auto qs = allowed_momenta(N);
  std::size_t m = 0;
  while (m < qs.size() && std::abs(excitation_amplitude(qs[m], 0.1, 0.5)) <= 1.0) ++m;
  REQUIRE(m < qs.size());
  double lo = 0.1 + 1e-9, hi = 0.5;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(excitation_amplitude(qs[m], 0.1, mid)) < 1.0 ? lo : hi) = mid;
  }
  const auto quench = ising_modes(N, 0.1, lo);
  const auto zs = bcs_zeros(quench, 0, 3);
  const double pair = quench.modes[m].pair_energy;
  int on_axis = 0;
  for (const auto& z : zs.zeros)
    if (z.chain_id == static_cast<long>(m)) {
      CHECK(std::abs(z.z.beta) < 1e-9);
      const double n = z.z.t * pair / 2 / kPi - 0.5;
      CHECK(std::abs(n - std::round(n)) < 1e-9);
      ++on_axis;
    }
  CHECK(on_axis == 4);
}

TEST_CASE("XY chain") {
  for (double q : {0.3, 1.1, 2.9})
    for (double h : {0.2, 1.7}) CHECK(xy_dispersion(q, 1.0, h) == doctest::Approx(2 * ising_dispersion(q, h / 4)));
  const auto roots = unit_modulus_momenta(1.5, 0.5, -1.5, -0.5);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] < roots[1]);
  for (double q : roots) CHECK(std::abs(std::abs(xy_excitation_amplitude(q, 1.5, 0.5, -1.5, -0.5)) - 1.0) < 1e-9);

  // Each line z(q) = (2 / E_pair)[ln|Z| + i pi (n + 1/2)] crosses beta = 0 at both roots.
  // The grid avoids q = pi / 2, where the two pair states are orthogonal.
  int sign_changes = 0;
  double prev = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double q = kPi * (i + 0.5) / 2000;
    const double b = std::log(std::abs(xy_excitation_amplitude(q, 1.5, 0.5, -1.5, -0.5)));
    if (i > 1 && (b > 0) != (prev > 0)) ++sign_changes;
    prev = b;
  }
  CHECK(sign_changes == 2);

  const auto modes = xy_modes(16, 1.5, 0.5, -1.5, -0.5);
  for (const auto& m : modes.modes) {
    CHECK(std::norm(m.u_i) + std::norm(m.v_i) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::norm(m.u_f) + std::norm(m.v_f) == doctest::Approx(1.0).epsilon(1e-14));
  }
  const auto d = bcs_populations(modes);
  CHECK(bcs_envelope(modes).members == compute_envelope(d).members);
}

TEST_CASE("general coefficient formula agrees with the Ising shortcut") {
  for (double q : allowed_momenta(14)) {
    const auto z = excitation_from_coefficients(bogoliubov(q, 0.12), bogoliubov(q, 0.61));
    CHECK(std::abs(z - excitation_amplitude(q, 0.12, 0.61)) < 1e-13);
  }
}

TEST_CASE("modes csv") {
  std::ostringstream os;
  ising_modes(6, 0.1, 0.3).write_modes_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("q,eps_i,eps_f,abs_Z,W\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
