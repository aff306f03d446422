#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <numbers>
#include <random>
#include <set>

#include "helpers.hpp"
#include "lzeros/envelope.hpp"
#include "lzeros/zero_finder.hpp"

using namespace lzeros;
using testing_support::make_dist;

namespace {

constexpr double kPi = std::numbers::pi;

// Levels that are the unique largest term at some beta of a uniform grid.
std::set<std::size_t> brute_dominant(const EnergyDistribution& d, double lo, double hi, int points) {
  std::set<std::size_t> out;
  for (int i = 0; i < points; ++i) {
    const double beta = lo + (hi - lo) * i / (points - 1);
    std::size_t best = 0;
    double best_v = -1e300;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double v = d.log_populations()[j] - d.energy(j) * beta;
      if (v > best_v) {
        best_v = v;
        best = j;
      }
    }
    out.insert(best);
  }
  return out;
}

SearchWindow window(double b0, double b1, double t0, double t1) {
  SearchWindow w;
  w.beta_min = b0;
  w.beta_max = b1;
  w.t_min = t0;
  w.t_max = t1;
  return w;
}

}  // namespace

TEST_CASE("level below the chord is not a member") {
  const auto d = make_dist({{0.0, 0.5}, {1.0, 0.25}, {2.0, 0.25}});
  const auto env = compute_envelope(d);
  CHECK(env.members == std::vector<std::size_t>{0, 2});
  CHECK(env.segments.size() == 1);
  const auto brute = brute_dominant(d, -50, 50, 100000);
  CHECK(brute == std::set<std::size_t>{0, 2});
}

TEST_CASE("two levels give one segment") {
  const auto d = make_dist({{0.0, 0.7}, {1.5, 0.3}});
  const auto env = compute_envelope(d);
  REQUIRE(env.segments.size() == 1);
  CHECK(env.segments[0].beta == doctest::Approx(std::log(0.3 / 0.7) / 1.5).epsilon(1e-12));
  CHECK(env.segments[0].period == doctest::Approx(2 * kPi / 1.5));
}

TEST_CASE("hull matches the brute-force dominance scan") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int levels = 2 + static_cast<int>(rng() % 40);
    const auto d = testing_support::random_dist(rng, levels, 4.0, 8.0);
    const auto env = compute_envelope(d);
    const double lo = -50, hi = 50;
    const int points = 100000;
    const double step = (hi - lo) / (points - 1);
    const auto brute = brute_dominant(d, lo, hi, points);
    for (std::size_t j : brute) CHECK(std::find(env.members.begin(), env.members.end(), j) != env.members.end());
    // Members the grid may miss: dominance interval narrower than the grid step or off the grid.
    for (std::size_t m = 0; m < env.members.size(); ++m) {
      if (brute.count(env.members[m])) continue;
      const double upper = m == 0 ? 1e300 : env.segments[m - 1].beta;
      const double lower = m + 1 == env.members.size() ? -1e300 : env.segments[m].beta;
      const bool narrow = upper - lower < 2 * step;
      const bool outside = lower > hi || upper < lo;
      CHECK((narrow || outside));
    }
    CHECK(env.members.front() == 0);
    CHECK(env.members.back() == d.size() - 1);
    CHECK(monotonicity_check(env));
  }
}

TEST_CASE("segment betas decrease along the energy order") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto env = compute_envelope(testing_support::random_dist(rng, 20));
    for (std::size_t s = 1; s < env.segments.size(); ++s)
      CHECK(env.segments[s].beta <= env.segments[s - 1].beta + 1e-12);
  }
}

TEST_CASE("geometric populations form one equidistant group") {
  std::vector<std::pair<double, double>> pairs;
  for (int j = 0; j <= 5; ++j) pairs.push_back({static_cast<double>(j), std::pow(2.0, -j)});
  const auto d = make_dist(pairs);
  const auto env = compute_envelope(d);
  CHECK(env.members.size() == 6);
  REQUIRE(env.groups.size() == 1);
  const auto& g = env.groups[0];
  CHECK(g.levels.size() == 6);
  CHECK(g.equidistant);
  CHECK(g.kappa == doctest::Approx(32.0).epsilon(1e-12));
  CHECK(g.spacing == doctest::Approx(1.0));

  // Zeros of sum_j (x/2)^j with x = e^{-z}: x = 2 w, w a nontrivial sixth root of unity.
  const auto approx = approximate_zeros(env, window(-2, 1, 0.1, 2 * kPi - 0.1));
  REQUIRE(approx.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(approx.zeros[k].z.beta == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(approx.zeros[k].z.t == doctest::Approx(2 * kPi * (k + 1) / 6.0).epsilon(1e-12));
  }
  const auto exact = find_zeros(d, window(-2, 1, 0.1, 2 * kPi - 0.1));
  CHECK(exact.size() == 5);
}

TEST_CASE("equal populations at a spacing of one") {
  const auto d = make_dist({{0.0, 0.5}, {1.0, 0.5}});
  const auto zs = approximate_zeros(compute_envelope(d), window(-1, 1, 0, 6 * kPi));
  REQUIRE(zs.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(zs.zeros[n].z.beta == doctest::Approx(0.0));
    CHECK(zs.zeros[n].z.t == doctest::Approx(kPi * (2 * n + 1)));
    CHECK(zs.zeros[n].provenance == Provenance::approximate);
  }
}

TEST_CASE("three equal populations give the cube roots of unity") {
  const auto d = make_dist({{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}});
  const auto env = compute_envelope(d);
  const auto zs = approximate_zeros(env, window(-1, 1, 0.1, 2 * kPi - 0.1));
  REQUIRE(zs.size() == 2);
  CHECK(zs.zeros[0].z.t == doctest::Approx(2 * kPi / 3));
  CHECK(zs.zeros[1].z.t == doctest::Approx(4 * kPi / 3));
  CHECK(std::abs(zs.zeros[0].z.beta) < 1e-12);
  CHECK(diagnostics(env).multilevel_at_axis);
}

TEST_CASE("non-equidistant groups are flagged") {
  // ln k linear in E with unequal spacing: all collinear.
  const auto d = make_dist({{0.0, 1.0}, {0.3, std::exp(-0.3)}, {2.0, std::exp(-2.0)}});
  const auto env = compute_envelope(d);
  REQUIRE(env.groups.size() == 1);
  CHECK_FALSE(env.groups[0].equidistant);
  const auto zs = approximate_zeros(env, window(-3, 1, 0, 10));
  REQUIRE(!zs.empty());
  for (const auto& z : zs.zeros) {
    CHECK(z.multilevel);
    CHECK(z.z.beta == doctest::Approx(-1.0));
  }
}

TEST_CASE("ratio R") {
  CHECK(diagnostics(compute_envelope(make_dist({{0.0, 0.25}, {1.0, 0.25}, {3.0, 0.5}}))).ratio_R ==
        doctest::Approx(0.5));
  CHECK(diagnostics(compute_envelope(make_dist({{0.0, 0.5}, {1.0, 0.5}}))).ratio_R == doctest::Approx(1.0));
  const auto diag = diagnostics(compute_envelope(make_dist({{0.0, 0.9}, {1.0, 0.1}})));
  CHECK(diag.ratio_R == doctest::Approx(1.0 / 9.0));
  CHECK(diag.max_index == 0);
}

TEST_CASE("monotone envelopes put zeros in one half-plane") {
  const auto dec = compute_envelope(make_dist({{0.0, 0.6}, {1.0, 0.3}, {2.5, 0.1}}));
  for (const auto& s : dec.segments) CHECK(s.beta < 0.0);
  const auto inc = compute_envelope(make_dist({{0.0, 0.1}, {1.0, 0.3}, {2.5, 0.6}}));
  for (const auto& s : inc.segments) CHECK(s.beta > 0.0);
  CHECK(monotonicity_check(dec));
  CHECK(monotonicity_check(inc));
}

TEST_CASE("approximate zero count follows the total energy span") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = testing_support::random_dist(rng, 12);
    const auto env = compute_envelope(d);
    double lo = 0, hi = 0;
    for (const auto& s : env.segments) {
      lo = std::min(lo, s.beta);
      hi = std::max(hi, s.beta);
    }
    const double T = 200.0;
    const auto zs = approximate_zeros(env, window(lo - 1, hi + 1, 0, T));
    const double expected = std::floor(T * d.energy_span() / (2 * kPi));
    CHECK(std::abs(static_cast<double>(zs.total_multiplicity()) - expected) <=
          static_cast<double>(env.segments.size()));
  }
}

TEST_CASE("explicit member lists") {
  const auto d = make_dist({{0.0, 0.5}, {1.0, 0.3}, {2.0, 0.2}});
  const auto env = envelope_from_members(d, {0, 1, 2});
  CHECK(env.segments.size() == 2);
  const auto j = nlohmann::json::parse(env.to_json());
  CHECK(j["members"].size() == 3);
  CHECK(j["segments"].size() == 2);
}
