#include "lzeros/spin_models.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>

#include "json.hpp"
#include "lzeros/envelope.hpp"
#include "lzeros/errors.hpp"
#include "tridiagonal.hpp"

namespace lzeros {
namespace {

constexpr Eigen::Index kDenseLimit = 600;

void check_spec(const IsingSpec& spec) {
  if (spec.N < 2) throw InvalidArgument("Ising model needs N >= 2");
  if (!(spec.alpha >= 0.0)) throw InvalidArgument("Ising range alpha must be >= 0");
  if (!std::isfinite(spec.h)) throw InvalidArgument("Ising field must be finite");
}

// Coupling 1/r^alpha on the periodic chain with the minimal-image distance.
double coupling(int N, int i, int j, double alpha) {
  const int r0 = std::abs(i - j);
  const int r = std::min(r0, N - r0);
  if (std::isinf(alpha)) return r == 1 ? 1.0 : 0.0;
  return std::pow(static_cast<double>(r), -alpha);
}

Eigen::MatrixXd dicke_sector_basis(int N, Sector sector) {
  const int dim = N + 1;
  if (sector == Sector::full) return Eigen::MatrixXd::Identity(dim, dim);
  std::vector<Eigen::VectorXd> cols;
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; 2 * i <= N; ++i) {
    const int partner = N - i;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    if (partner == i) {
      if (sector == Sector::odd_parity) continue;
      v(i) = 1.0;
    } else {
      v(i) = r;
      v(partner) = sector == Sector::even_parity ? r : -r;
    }
    cols.push_back(std::move(v));
  }
  Eigen::MatrixXd B(dim, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = cols[c];
  return B;
}

Eigen::MatrixXd dicke_transverse(int N) {
  const double S = 0.5 * N;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int i = 0; i < N; ++i) {
    const double M = i - S;
    const double el = 0.5 * std::sqrt(S * (S + 1.0) - M * (M + 1.0));
    X(i + 1, i) = el;
    X(i, i + 1) = el;
  }
  return X;
}

// Long-range Hamiltonian: diagonal zz part plus `field` times the transverse
// operator, in the requested sector.
double zz_energy(const std::vector<double>& J, int N, std::uint64_t b) {
  double zz = 0.0;
  for (int i = 0; i < N; ++i) {
    const double si = (b >> i) & 1ULL ? 0.5 : -0.5;
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      const double sj = (b >> j) & 1ULL ? 0.5 : -0.5;
      zz += J[static_cast<std::size_t>(i * N + j)] * si * sj;
    }
  }
  return zz;
}

std::vector<double> coupling_table(int N, double alpha) {
  std::vector<double> J(static_cast<std::size_t>(N * N), 0.0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j) J[static_cast<std::size_t>(i * N + j)] = coupling(N, i, j, alpha);
  return J;
}

Eigen::MatrixXd long_range_matrix(const IsingSpec& spec, double zz_scale, double field) {
  const int N = spec.N;
  if (N > kLongRangeSizeCap)
    throw SizeCap("long-range model limited to N <= " + std::to_string(kLongRangeSizeCap));
  const double kac = kac_norm(N, spec.alpha);
  const auto J = coupling_table(N, spec.alpha);

  const std::uint64_t full = 1ULL << N;
  const std::uint64_t mask = full - 1;
  const bool sectored = spec.sector != Sector::full;
  const std::uint64_t dim = sectored ? full / 2 : full;
  const double sign = spec.sector == Sector::odd_parity ? -1.0 : 1.0;
  const double u = spec.unit_factor();

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double zz = zz_energy(J, N, b);
    const auto bi = static_cast<Eigen::Index>(b);
    H(bi, bi) += -zz_scale * zz / kac * u;
    for (int i = 0; i < N; ++i) {
      std::uint64_t c = b ^ (1ULL << i);
      double el = 0.5 * field * u;
      if (sectored && c >= dim) {
        c ^= mask;
        el *= sign;
      }
      H(bi, static_cast<Eigen::Index>(c)) += el;
    }
  }
  return H;
}

// Zero-momentum part of the even-parity sector of the periodic chain. Each
// basis state is the normalized sum over the orbit of a configuration under
// translations and the global spin flip.
struct OrbitBasis {
  std::vector<std::uint64_t> reps;
  std::vector<double> sizes;
  std::vector<int> index_of;  // orbit of every configuration
};

OrbitBasis even_orbit_basis(int N) {
  const std::uint64_t full = 1ULL << N;
  const std::uint64_t mask = full - 1;
  auto rotate = [&](std::uint64_t x, int r) { return r == 0 ? x : ((x << r) | (x >> (N - r))) & mask; };
  OrbitBasis b;
  b.index_of.assign(full, -1);
  std::vector<std::uint64_t> orbit;
  for (std::uint64_t s = 0; s < full; ++s) {
    if (b.index_of[s] >= 0) continue;
    orbit.clear();
    for (int flip = 0; flip < 2; ++flip)
      for (int r = 0; r < N; ++r) {
        const std::uint64_t x = rotate(s, r) ^ (flip ? mask : 0);
        if (std::find(orbit.begin(), orbit.end(), x) == orbit.end()) orbit.push_back(x);
      }
    const int idx = static_cast<int>(b.reps.size());
    for (std::uint64_t x : orbit) b.index_of[x] = idx;
    b.reps.push_back(s);
    b.sizes.push_back(static_cast<double>(orbit.size()));
  }
  return b;
}

// H restricted to the orbit basis: <O_b|H|O_a> = sqrt(|O_a| / |O_b|) sum over
// x in O_b of <x|H|rep_a>, since H commutes with every symmetry.
Eigen::MatrixXd orbit_matrix(const IsingSpec& spec, const OrbitBasis& basis, double zz_scale, double field) {
  const int N = spec.N;
  const double kac = kac_norm(N, spec.alpha);
  const auto J = coupling_table(N, spec.alpha);
  const double u = spec.unit_factor();
  const auto dim = static_cast<Eigen::Index>(basis.reps.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const std::uint64_t r = basis.reps[static_cast<std::size_t>(a)];
    H(a, a) += -zz_scale * zz_energy(J, N, r) / kac * u;
    for (int i = 0; i < N; ++i) {
      const int b = basis.index_of[r ^ (1ULL << i)];
      H(b, a) += std::sqrt(basis.sizes[static_cast<std::size_t>(a)] / basis.sizes[static_cast<std::size_t>(b)]) *
                 0.5 * field * u;
    }
  }
  return 0.5 * (H + H.transpose());
}

Eigen::MatrixXd dicke_matrix(const IsingSpec& spec, double zz_scale, double field) {
  const int N = spec.N;
  const double S = 0.5 * N;
  const double kac = kac_norm(N, 0.0);
  const double u = spec.unit_factor();
  Eigen::MatrixXd H = field * u * dicke_transverse(N);
  for (int i = 0; i <= N; ++i) {
    const double M = i - S;
    H(i, i) += -zz_scale * (M * M - 0.25 * N) / kac * u;
  }
  return H;
}

Eigen::MatrixXd sector_matrix(const IsingSpec& spec, double zz_scale, double field) {
  check_spec(spec);
  if (spec.collective()) {
    const Eigen::MatrixXd B = dicke_sector_basis(spec.N, spec.sector);
    Eigen::MatrixXd H = B.transpose() * dicke_matrix(spec, zz_scale, field) * B;
    return 0.5 * (H + H.transpose());
  }
  return long_range_matrix(spec, zz_scale, field);
}

}  // namespace

std::string sector_name(Sector s) {
  switch (s) {
    case Sector::even_parity:
      return "even_parity";
    case Sector::odd_parity:
      return "odd_parity";
    case Sector::full:
      return "full";
  }
  return "full";
}

std::string units_name(Units u) { return u == Units::per_site ? "per_site" : "extensive"; }

double kac_norm(int N, double alpha) {
  if (N < 2) throw InvalidArgument("kac_norm needs N >= 2");
  if (std::isinf(alpha)) return 2.0;
  double s = 0.0;
  for (int n = 1; n < N; ++n) s += static_cast<double>(N - n) / std::pow(static_cast<double>(n), alpha);
  return 2.0 * s / static_cast<double>(N - 1);
}

Eigen::MatrixXd build_fully_connected(const IsingSpec& spec) {
  check_spec(spec);
  if (spec.alpha != 0.0) throw InvalidArgument("build_fully_connected needs alpha = 0");
  return dicke_matrix(spec, 1.0, spec.h);
}

Eigen::MatrixXd build_long_range(const IsingSpec& spec) {
  check_spec(spec);
  if (spec.alpha == 0.0) throw InvalidArgument("build_long_range needs alpha > 0");
  return long_range_matrix(spec, 1.0, spec.h);
}

Eigen::MatrixXd sector_hamiltonian(const IsingSpec& spec) { return sector_matrix(spec, 1.0, spec.h); }

Eigen::MatrixXd sector_transverse(const IsingSpec& spec) { return sector_matrix(spec, 0.0, 1.0); }

SpectralPopulations spectral_populations(const Eigen::MatrixXd& H, const Eigen::VectorXd& psi) {
  SpectralPopulations out;
  const Eigen::Index n = H.rows();
  if (n <= kDenseLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    const Eigen::VectorXd c = es.eigenvectors().transpose() * psi;
    for (Eigen::Index j = 0; j < n; ++j) {
      out.eigenvalues.push_back(es.eigenvalues()(j));
      out.weights.push_back(c(j) * c(j));
    }
    return out;
  }
  // Large case: tridiagonalize, then carry only psi's projection through
  // the QL rotations instead of accumulating all eigenvectors.
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(H);
  const Eigen::VectorXd c = tri.matrixQ().adjoint() * psi;
  // diagonal() and subDiagonal() are strided views; copy them out.
  const Eigen::VectorXd dv = tri.diagonal(), ev = tri.subDiagonal();
  std::vector<double> d(dv.data(), dv.data() + n);
  std::vector<double> e(ev.data(), ev.data() + n - 1);
  std::vector<double> row(c.data(), c.data() + n);
  detail::tridiagonal_ql(d, e, row);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  for (std::size_t j : order) {
    out.eigenvalues.push_back(d[j]);
    out.weights.push_back(row[j] * row[j]);
  }
  return out;
}

GroundState ground_state(const Eigen::MatrixXd& H) {
  GroundState g;
  const Eigen::Index n = H.rows();
  if (n == 0) throw InvalidArgument("ground_state of an empty matrix");
  if (n <= kDenseLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    g.energy = es.eigenvalues()(0);
    g.gap = n > 1 ? es.eigenvalues()(1) - g.energy : std::numeric_limits<double>::infinity();
    g.vector = es.eigenvectors().col(0);
    return g;
  }
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(H);
  const Eigen::VectorXd dv = tri.diagonal(), sv = tri.subDiagonal();
  std::vector<double> d(dv.data(), dv.data() + n);
  std::vector<double> e(sv.data(), sv.data() + n - 1);
  std::vector<double> ev = d, none;
  detail::tridiagonal_ql(ev, e, none);
  std::sort(ev.begin(), ev.end());
  g.energy = ev[0];
  g.gap = ev[1] - ev[0];
  const auto y = detail::tridiagonal_lowest_vector(d, e, ev[0]);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  g.vector = tri.matrixQ() * yv;
  g.vector.normalize();
  return g;
}

EnergyDistribution QuenchResult::distribution(const DistributionOptions& options) const {
  std::string label = "ising N=" + std::to_string(spec_final.N);
  return EnergyDistribution::from_arrays(eigenvalues, populations, options, label);
}

namespace {

nlohmann::ordered_json spec_json(const IsingSpec& s) {
  nlohmann::ordered_json j;
  j["N"] = s.N;
  j["h"] = s.h;
  if (std::isinf(s.alpha))
    j["alpha"] = "inf";
  else
    j["alpha"] = s.alpha;
  j["sector"] = sector_name(s.sector);
  j["units"] = units_name(s.units);
  return j;
}

}  // namespace

std::string QuenchResult::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["spec_initial"] = spec_json(spec_initial);
  j["spec_final"] = spec_json(spec_final);
  j["levels"] = eigenvalues.size();
  j["initial_energy"] = initial_energy;
  j["transverse_expectation"] = transverse_expectation;
  j["mean_energy"] = mean_energy;
  const auto shift = mean_energy_shift(*this);
  j["mean_energy_predicted"] = shift.predicted;
  j["esqpt_energy"] = esqpt_energy ? nlohmann::ordered_json(*esqpt_energy) : nlohmann::ordered_json(nullptr);
  j["time_unit"] = spec_final.units == Units::per_site ? "N / coupling" : "1 / coupling";
  return j.dump(indent);
}

namespace {

// Ground states of recently used initial specs. Scans over h_f reuse the
// same initial state many times.
class GroundStateCache {
 public:
  using Key = std::tuple<int, double, double, int, int>;

  std::shared_ptr<const GroundState> get(const IsingSpec& spec, const Eigen::MatrixXd& H) {
    const Key key{spec.N, spec.h, spec.alpha, static_cast<int>(spec.sector), static_cast<int>(spec.units)};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      const auto it = entries_.find(key);
      if (it != entries_.end()) return it->second;
    }
    auto gs = std::make_shared<const GroundState>(ground_state(H));
    std::lock_guard<std::mutex> lock(mutex_);
    if (entries_.size() >= kMaxEntries) entries_.clear();
    entries_.emplace(key, gs);
    return gs;
  }

 private:
  static constexpr std::size_t kMaxEntries = 8;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const GroundState>> entries_;
};

GroundStateCache& ground_state_cache() {
  static GroundStateCache cache;
  return cache;
}

}  // namespace

QuenchResult quench(const IsingSpec& initial, const IsingSpec& final_spec) {
  check_spec(initial);
  check_spec(final_spec);
  const bool same_alpha = initial.alpha == final_spec.alpha ||
                          (std::isinf(initial.alpha) && std::isinf(final_spec.alpha));
  if (initial.N != final_spec.N || !same_alpha || initial.sector != final_spec.sector ||
      initial.units != final_spec.units)
    throw InvalidArgument("quench specs may differ only in the field h");

  // The even-sector ground state of the periodic chain carries zero momentum,
  // so the long-range quench never leaves the translation-invariant states.
  const bool orbits = !initial.collective() && initial.sector == Sector::even_parity;
  OrbitBasis basis;
  if (orbits) {
    if (initial.N > kLongRangeSizeCap)
      throw SizeCap("long-range model limited to N <= " + std::to_string(kLongRangeSizeCap));
    basis = even_orbit_basis(initial.N);
  }
  const Eigen::MatrixXd Hi = orbits ? orbit_matrix(initial, basis, 1.0, initial.h) : sector_hamiltonian(initial);
  const auto gs_ptr = ground_state_cache().get(initial, Hi);
  const GroundState& gs = *gs_ptr;
  if (gs.gap < 1e-10)
    throw DegenerateGroundState("ground state of H(h_i) is degenerate in the chosen sector");

  const Eigen::MatrixXd V = orbits ? orbit_matrix(initial, basis, 0.0, 1.0) : sector_transverse(initial);
  const Eigen::MatrixXd Hf = Hi + (final_spec.h - initial.h) * V;
  const auto sp = spectral_populations(Hf, gs.vector);

  QuenchResult q;
  q.spec_initial = initial;
  q.spec_final = final_spec;
  q.eigenvalues = sp.eigenvalues;
  q.populations = sp.weights;
  q.initial_energy = gs.vector.dot(Hi * gs.vector);
  q.transverse_expectation = gs.vector.dot(V * gs.vector);
  q.mean_energy = 0.0;
  for (std::size_t j = 0; j < q.eigenvalues.size(); ++j) q.mean_energy += q.populations[j] * q.eigenvalues[j];
  if (final_spec.collective() && final_spec.units == Units::per_site && std::abs(final_spec.h) < 1.0)
    q.esqpt_energy = esqpt_energy(final_spec);
  return q;
}

MeanEnergyShift mean_energy_shift(const QuenchResult& q) {
  MeanEnergyShift s;
  s.predicted = q.initial_energy + (q.spec_final.h - q.spec_initial.h) * q.transverse_expectation;
  s.actual = q.mean_energy;
  return s;
}

double esqpt_energy(const IsingSpec& spec) {
  if (spec.alpha != 0.0) throw InvalidArgument("esqpt_energy is defined for the fully connected model");
  if (spec.units != Units::per_site) throw InvalidArgument("esqpt_energy is given in per-site units");
  if (std::abs(spec.h) >= 1.0) throw OutOfPhase("no excited-state transition for |h| >= 1");
  return -0.5 * std::abs(spec.h);
}

std::vector<RRatioEntry> r_ratio_scan(double h_i, const std::vector<double>& delta_h_grid,
                                      const std::vector<int>& N_grid) {
  std::vector<RRatioEntry> out;
  for (int N : N_grid) {
    IsingSpec si;
    si.N = N;
    si.h = h_i;
    si.alpha = 0.0;
    si.units = Units::per_site;
    for (double dh : delta_h_grid) {
      IsingSpec sf = si;
      sf.h = h_i + dh;
      const auto q = quench(si, sf);
      const auto env = compute_envelope(q.distribution());
      out.push_back({N, dh, diagnostics(env).ratio_R});
    }
  }
  return out;
}

std::optional<double> first_r_crossing(int N, double h_i, double lo, double hi, double step,
                                       double tol) {
  IsingSpec si;
  si.N = N;
  si.h = h_i;
  si.alpha = 0.0;
  si.units = Units::per_site;
  auto pops = [&](double dh) {
    IsingSpec sf = si;
    sf.h = h_i + dh;
    return quench(si, sf).populations;
  };
  auto argmax = [](const std::vector<double>& p) {
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  };

  std::size_t a = argmax(pops(lo));
  double prev = lo;
  for (double dh = lo + step; dh <= hi + 1e-12; dh += step) {
    const auto p = pops(dh);
    const std::size_t b = argmax(p);
    if (b != a) {
      // Bisect on k_a - k_b between prev and dh.
      double l = prev, r = dh;
      while (r - l > tol) {
        const double mid = 0.5 * (l + r);
        const auto pm = pops(mid);
        if (pm[a] >= pm[b])
          l = mid;
        else
          r = mid;
      }
      return 0.5 * (l + r);
    }
    prev = dh;
  }
  return std::nullopt;
}

}  // namespace lzeros
