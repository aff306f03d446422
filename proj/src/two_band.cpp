#include "lzeros/two_band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>

#include "format.hpp"
#include "lzeros/errors.hpp"

namespace lzeros {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kGapFloor = 1e-14;

void finish_mode(ModeData& m, double energy_scale) {
  m.Z = excitation_from_coefficients({m.u_i, m.v_i}, {m.u_f, m.v_f});
  const double az = std::abs(m.Z);
  m.W = az > 0.0 ? std::log(az) / m.eps_f : -std::numeric_limits<double>::infinity();
  m.pair_energy = 2.0 * energy_scale * m.eps_f;
}

void check_N(int N) {
  if (N < 2 || N % 2 != 0) throw InvalidArgument("two-band model needs an even N >= 2");
}

// log(1 + exp(lw)) for complex lw, without overflow.
cplx log1p_exp(cplx lw) {
  if (lw.real() > 0.0) return lw + std::log(1.0 + std::exp(-lw));
  return std::log(1.0 + std::exp(lw));
}

// exp(lw) / (1 + exp(lw)).
cplx logistic(cplx lw) {
  if (lw.real() > 0.0) return 1.0 / (1.0 + std::exp(-lw));
  const cplx e = std::exp(lw);
  return e / (1.0 + e);
}

}  // namespace

double ising_dispersion(double q, double h) {
  const double s = 4.0 * h - std::cos(q);
  const double sq = std::sin(q);
  return std::sqrt(s * s + sq * sq);
}

Bogoliubov bogoliubov(double q, double h) {
  const double eps = ising_dispersion(q, h);
  if (eps < kGapFloor) throw GaplessMode("gapless Ising mode at q = " + detail::fmt_double(q));
  const double s = 4.0 * h - std::cos(q);
  const double sq = std::sin(q);
  // eps + s without cancellation when s < 0.
  const double eps_s = s >= 0.0 ? eps + s : sq * sq / (eps - s);
  Bogoliubov b;
  if (eps_s > kGapFloor * eps) {
    b.u = std::sqrt(eps_s / (2.0 * eps));
    b.v = cplx(0.0, sq / std::sqrt(2.0 * eps * eps_s));
  } else {
    // s = -eps with sin q = 0: the mode is fully inverted.
    b.u = 0.0;
    b.v = cplx(0.0, sq >= 0.0 ? 1.0 : -1.0);
  }
  return b;
}

cplx excitation_from_coefficients(const Bogoliubov& ini, const Bogoliubov& fin) {
  // u is even and v odd in q.
  const cplx u_i = ini.u, v_i = ini.v, u_f = fin.u, v_f = fin.v;
  const cplx num = u_f * v_i + u_i * (-v_f);
  const cplx den = std::conj(u_i) * u_f + std::conj(-v_i) * (-v_f);
  if (std::abs(den) < 1e-14) throw OrthogonalMode("initial and final pair states are orthogonal");
  return num / den;
}

cplx excitation_amplitude(double q, double h_i, double h_f) {
  return excitation_from_coefficients(bogoliubov(q, h_i), bogoliubov(q, h_f));
}

double xy_dispersion(double q, double gamma, double h) {
  const double a = h - std::cos(q);
  const double b = gamma * std::sin(q);
  return 2.0 * std::sqrt(a * a + b * b);
}

Bogoliubov xy_bogoliubov(double q, double gamma, double h) {
  if (xy_dispersion(q, gamma, h) < kGapFloor)
    throw GaplessMode("gapless XY mode at q = " + detail::fmt_double(q));
  const double theta = std::atan2(gamma * std::sin(q), h - std::cos(q));
  return {cplx(std::cos(0.5 * theta), 0.0), cplx(0.0, std::sin(0.5 * theta))};
}

cplx xy_excitation_amplitude(double q, double gamma_i, double h_i, double gamma_f, double h_f) {
  return excitation_from_coefficients(xy_bogoliubov(q, gamma_i, h_i), xy_bogoliubov(q, gamma_f, h_f));
}

std::vector<double> allowed_momenta(int N) {
  check_N(N);
  std::vector<double> q;
  for (int m = 1; m <= N / 2; ++m) q.push_back((2.0 * m - 1.0) * kPi / N);
  return q;
}

TwoBandQuench ising_modes(int N, double h_i, double h_f, double energy_scale) {
  TwoBandQuench out;
  out.N = N;
  out.model = TwoBandModel::ising_nn;
  out.h_i = h_i;
  out.h_f = h_f;
  out.energy_scale = energy_scale;
  for (double q : allowed_momenta(N)) {
    ModeData m;
    m.q = q;
    m.eps_i = ising_dispersion(q, h_i);
    m.eps_f = ising_dispersion(q, h_f);
    const auto bi = bogoliubov(q, h_i);
    const auto bf = bogoliubov(q, h_f);
    m.u_i = bi.u;
    m.v_i = bi.v;
    m.u_f = bf.u;
    m.v_f = bf.v;
    finish_mode(m, energy_scale);
    out.modes.push_back(m);
  }
  return out;
}

TwoBandQuench xy_modes(int N, double gamma_i, double h_i, double gamma_f, double h_f) {
  TwoBandQuench out;
  out.N = N;
  out.model = TwoBandModel::xy;
  out.h_i = h_i;
  out.h_f = h_f;
  out.gamma_i = gamma_i;
  out.gamma_f = gamma_f;
  out.energy_scale = 1.0;
  for (double q : allowed_momenta(N)) {
    ModeData m;
    m.q = q;
    m.eps_i = xy_dispersion(q, gamma_i, h_i);
    m.eps_f = xy_dispersion(q, gamma_f, h_f);
    const auto bi = xy_bogoliubov(q, gamma_i, h_i);
    const auto bf = xy_bogoliubov(q, gamma_f, h_f);
    m.u_i = bi.u;
    m.v_i = bi.v;
    m.u_f = bf.u;
    m.v_f = bf.v;
    finish_mode(m, out.energy_scale);
    out.modes.push_back(m);
  }
  return out;
}

void TwoBandQuench::write_modes_csv(std::ostream& os) const {
  os << "q,eps_i,eps_f,abs_Z,W\n";
  for (const auto& m : modes) {
    os << detail::fmt_double(m.q) << ',' << detail::fmt_double(m.eps_i) << ','
       << detail::fmt_double(m.eps_f) << ',' << detail::fmt_double(std::abs(m.Z)) << ','
       << detail::fmt_double(m.W) << '\n';
  }
}

EnergyDistribution bcs_populations(const TwoBandQuench& quench) {
  const std::size_t M = quench.modes.size();
  if (M > static_cast<std::size_t>(kSubsetModeCap))
    throw SizeCap("pair-subset enumeration limited to N/2 <= " + std::to_string(kSubsetModeCap));
  std::vector<double> log_z2(M), energy(M);
  for (std::size_t m = 0; m < M; ++m) {
    const double az = std::abs(quench.modes[m].Z);
    log_z2[m] = az > 0.0 ? 2.0 * std::log(az) : -std::numeric_limits<double>::infinity();
    energy[m] = quench.modes[m].pair_energy;
  }
  const std::size_t count = std::size_t{1} << M;
  std::vector<double> e(count, 0.0), lp(count, 0.0);
  for (std::size_t s = 1; s < count; ++s) {
    // Extend the subset without its lowest bit.
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(s));
    const std::size_t prev = s & (s - 1);
    e[s] = e[prev] + energy[low];
    lp[s] = lp[prev] + log_z2[low];
  }
  const double top = *std::max_element(lp.begin(), lp.end());
  std::vector<double> p(count);
  for (std::size_t s = 0; s < count; ++s) p[s] = std::exp(lp[s] - top);
  DistributionOptions opt;
  opt.population_floor = 0.0;
  return EnergyDistribution::from_arrays(e, p, opt, "two-band N=" + std::to_string(quench.N));
}

std::vector<std::size_t> w_order(const TwoBandQuench& quench) {
  std::vector<std::size_t> idx(quench.modes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double wa = quench.modes[a].W, wb = quench.modes[b].W;
    if (wa != wb) return wa > wb;
    return quench.modes[a].q < quench.modes[b].q;
  });
  return idx;
}

Envelope bcs_envelope(const TwoBandQuench& quench) {
  const EnergyDistribution dist = bcs_populations(quench);
  const double tol = 1e-9 * std::max(1.0, dist.energy_span());
  std::vector<std::size_t> members;
  double energy = 0.0;
  auto add = [&](double e) {
    const std::size_t j = dist.find_energy(e, tol);
    if (j < dist.size()) members.push_back(j);
  };
  add(energy);
  for (std::size_t m : w_order(quench)) {
    if (std::abs(quench.modes[m].Z) == 0.0) continue;
    energy += quench.modes[m].pair_energy;
    add(energy);
  }
  return envelope_from_members(dist, std::move(members));
}

ZeroSet bcs_zeros(const TwoBandQuench& quench, long n_min, long n_max) {
  ZeroSet out;
  for (std::size_t m = 0; m < quench.modes.size(); ++m) {
    const auto& md = quench.modes[m];
    const double az = std::abs(md.Z);
    if (az == 0.0) continue;
    const double scale = 2.0 / md.pair_energy;
    for (long n = n_min; n <= n_max; ++n) {
      Zero z;
      z.z = {scale * std::log(az), scale * kPi * (static_cast<double>(n) + 0.5)};
      z.provenance = Provenance::analytic;
      z.chain_id = static_cast<long>(m);
      out.zeros.push_back(z);
    }
  }
  out.sort();
  return out;
}

ZeroSet bcs_zeros(const TwoBandQuench& quench, const SearchWindow& window) {
  ZeroSet out;
  const Rect r = window.rect();
  out.window = r;
  for (std::size_t m = 0; m < quench.modes.size(); ++m) {
    const auto& md = quench.modes[m];
    const double az = std::abs(md.Z);
    if (az == 0.0) continue;
    const double scale = 2.0 / md.pair_energy;
    const double period = 2.0 * kPi * scale / 2.0;
    const auto lo = static_cast<long>(std::ceil(r.t_min / period - 0.5 - 1e-12));
    const auto hi = static_cast<long>(std::floor(r.t_max / period - 0.5 + 1e-12));
    for (long n = lo; n <= hi; ++n) {
      Zero z;
      z.z = {scale * std::log(az), scale * kPi * (static_cast<double>(n) + 0.5)};
      if (!r.contains(z.z.beta, z.z.t)) continue;
      z.provenance = Provenance::analytic;
      z.chain_id = static_cast<long>(m);
      out.zeros.push_back(z);
    }
  }
  out.sort();
  return out;
}

AmplitudeValue factorized_amplitude(const TwoBandQuench& quench, ComplexTime z) {
  double log_mod = 0.0, phase = 0.0;
  const cplx zc = z.as_complex();
  for (const auto& m : quench.modes) {
    const double az = std::abs(m.Z);
    if (az == 0.0) continue;
    const double lz2 = 2.0 * std::log(az);
    const cplx f = log1p_exp(lz2 - zc * m.pair_energy);
    log_mod += f.real() - log1p_exp(cplx(lz2, 0.0)).real();
    phase += f.imag();
  }
  if (!std::isfinite(log_mod)) return {-std::numeric_limits<double>::infinity(), 0.0};
  phase = std::remainder(phase, 2.0 * kPi);
  if (phase <= -kPi) phase += 2.0 * kPi;
  return {log_mod, phase};
}

AmplitudeFunction factorized_function(const TwoBandQuench& quench) {
  struct Mode {
    double lz2;
    double energy;
  };
  std::vector<Mode> modes;
  for (const auto& m : quench.modes) {
    const double az = std::abs(m.Z);
    if (az > 0.0) modes.push_back({2.0 * std::log(az), m.pair_energy});
  }
  // Each factor is multiplied by exp(z E / 2), which adds no zeros.
  return [modes](cplx z) -> LogSample {
    cplx log_sum = 0.0, dlog = 0.0;
    for (const auto& m : modes) {
      const cplx lw = m.lz2 - z * m.energy;
      log_sum += log1p_exp(lw) + 0.5 * z * m.energy;
      dlog += m.energy * (0.5 - logistic(lw));
    }
    LogSample s;
    s.log_modulus = log_sum.real();
    s.phase = log_sum.imag();
    s.dlog = dlog;
    if (!std::isfinite(s.log_modulus)) s.log_modulus = -std::numeric_limits<double>::infinity();
    return s;
  };
}

std::vector<double> unit_modulus_momenta(double gamma_i, double h_i, double gamma_f, double h_f,
                                         int grid) {
  auto g = [&](double q) {
    return std::log(std::abs(xy_excitation_amplitude(q, gamma_i, h_i, gamma_f, h_f)));
  };
  std::vector<double> roots;
  double q0 = kPi / grid * 0.5;
  double g0 = g(q0);
  for (int i = 1; i < grid; ++i) {
    const double q1 = kPi * (i + 0.5) / grid;
    const double g1 = g(q1);
    if (std::isfinite(g0) && std::isfinite(g1) && (g0 < 0.0) != (g1 < 0.0)) {
      double lo = q0, hi = q1, glo = g0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    q0 = q1;
    g0 = g1;
  }
  return roots;
}

}  // namespace lzeros
