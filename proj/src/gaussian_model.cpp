#include "lzeros/gaussian_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lzeros/errors.hpp"

namespace lzeros {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

AmplitudeValue to_value(cplx log_value) {
  if (!std::isfinite(log_value.real())) return {-kInf, 0.0};
  double ph = std::remainder(log_value.imag(), 2.0 * kPi);
  if (ph <= -kPi) ph += 2.0 * kPi;
  return {log_value.real(), ph};
}

// log sum_k exp(a_k) for complex a_k.
struct LogSum {
  std::vector<cplx> terms;
  cplx value() const {
    double top = -kInf;
    for (const auto& a : terms) top = std::max(top, a.real());
    if (!std::isfinite(top)) return {-kInf, 0.0};
    cplx s = 0.0;
    for (const auto& a : terms) s += std::exp(a - top);
    if (s == 0.0) return {-kInf, 0.0};
    return top + std::log(s);
  }
};

cplx log_term(const GaussianSpec& spec, long j, cplx z) {
  const double jd = static_cast<double>(j);
  return spec.log_weight(jd) - z * spec.energy(jd);
}

void check_validity(const GaussianSpec& spec, double beta) {
  if (!(1.0 + beta * spec.epsilon * spec.sigma * spec.sigma > 0.0))
    throw OutOfValidity("outside the convergence half-plane of the unbounded Gaussian model");
}

}  // namespace

void GaussianSpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("Gaussian model needs delta > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("Gaussian model needs sigma > 0");
  if (!std::isfinite(epsilon) || !std::isfinite(mu) || !std::isfinite(E_GS))
    throw InvalidArgument("Gaussian model parameters must be finite");
  if (j_min > j_max) throw InvalidArgument("Gaussian model needs j_min <= j_max");
  for (int j = j_min; j < j_max; ++j)
    if (!(spacing(j) > 0.0))
      throw InvalidSpacing("level spacing turns non-positive at j = " + std::to_string(j));
}

EnergyDistribution build_distribution(const GaussianSpec& spec, const DistributionOptions& options) {
  spec.validate();
  std::vector<Level> levels;
  double top = -kInf;
  for (int j = spec.j_min; j <= spec.j_max; ++j) top = std::max(top, spec.log_weight(j));
  for (int j = spec.j_min; j <= spec.j_max; ++j)
    levels.push_back({spec.energy(j), std::exp(spec.log_weight(j) - top)});
  return EnergyDistribution::from_levels(std::move(levels), options, "gaussian");
}

AmplitudeFunction bounded_function(const GaussianSpec& spec) {
  spec.validate();
  std::vector<double> lw, e;
  for (int j = spec.j_min; j <= spec.j_max; ++j) {
    lw.push_back(spec.log_weight(j));
    e.push_back(spec.energy(j));
  }
  return sum_function(std::move(lw), std::move(e));
}

CenteredSpec center_spec(const GaussianSpec& spec) {
  CenteredSpec c;
  c.shift = static_cast<int>(std::lround(spec.mu));
  c.residual = spec.mu - c.shift;
  c.spec = spec;
  const double m = c.shift;
  c.spec.E_GS = spec.energy(m);
  c.spec.delta = spec.delta + m * spec.epsilon;
  c.spec.mu = 0.0;
  c.spec.j_min = spec.j_min - c.shift;
  c.spec.j_max = spec.j_max - c.shift;
  return c;
}

cplx theta_u(const GaussianSpec& spec, cplx z) { return cplx(0.0, 0.5 * spec.delta) * z; }

cplx theta_tau(const GaussianSpec& spec, cplx z) {
  const double s2 = spec.sigma * spec.sigma;
  // (i / pi) / (2 sigma^2(z)) with sigma^2(z) = sigma^2 / (1 + z eps sigma^2)
  return cplx(0.0, 1.0 / kPi) * (1.0 + z * spec.epsilon * s2) / (2.0 * s2);
}

AmplitudeValue unbounded_amplitude(const GaussianSpec& spec_in, ComplexTime z) {
  const GaussianSpec spec = center_spec(spec_in).spec;
  check_validity(spec, z.beta);
  const cplx zc = z.as_complex();
  const cplx num = log_theta3({theta_u(spec, zc), theta_tau(spec, zc)});
  const cplx den = log_theta3({theta_u(spec, z.beta), theta_tau(spec, z.beta)});
  // The ground-state offset contributes the phase exp(-i t E_GS).
  return to_value(num - den.real() - cplx(0.0, z.t * spec.E_GS));
}

ComplexTime unbounded_zero(const GaussianSpec& spec_in, int j, long n) {
  const GaussianSpec spec = center_spec(spec_in).spec;
  const double d = spec.spacing(j - 1);
  if (!(d > 0.0)) throw InvalidSpacing("non-positive spacing for the zero chain at j = " + std::to_string(j));
  const double s2 = spec.sigma * spec.sigma;
  return {-(2.0 * j - 1.0) / (2.0 * s2) / d, 2.0 * kPi * (static_cast<double>(n) + 0.5) / d};
}

ZeroSet unbounded_zeros(const GaussianSpec& spec_in, const SearchWindow& window) {
  const GaussianSpec spec = center_spec(spec_in).spec;
  ZeroSet out;
  const Rect r = window.rect();
  out.window = r;
  const double s2 = spec.sigma * spec.sigma;
  const long jcap = 200000;
  for (long j = -jcap; j <= jcap; ++j) {
    const double d = spec.spacing(static_cast<double>(j) - 1.0);
    if (!(d > 0.0)) continue;
    const double beta = -(2.0 * j - 1.0) / (2.0 * s2) / d;
    if (!(beta >= r.beta_min && beta < r.beta_max)) continue;
    const double period = 2.0 * kPi / d;
    const auto lo = static_cast<long>(std::ceil(r.t_min / period - 0.5 - 1e-12));
    const auto hi = static_cast<long>(std::floor(r.t_max / period - 0.5 + 1e-12));
    for (long n = lo; n <= hi; ++n) {
      Zero z;
      z.z = {beta, period * (static_cast<double>(n) + 0.5)};
      if (!r.contains(z.z.beta, z.z.t)) continue;
      z.provenance = Provenance::analytic;
      z.chain_id = j;
      out.zeros.push_back(z);
    }
  }
  out.sort();
  return out;
}

std::vector<Polyline> zero_lines(const GaussianSpec& spec_in, long n_min, long n_max, double x_min,
                                 double x_max, int samples) {
  const GaussianSpec spec = center_spec(spec_in).spec;
  if (samples < 2) throw InvalidArgument("zero_lines needs at least two samples");
  const double s2 = spec.sigma * spec.sigma;
  std::vector<Polyline> out;
  for (long n = n_min; n <= n_max; ++n) {
    Polyline p;
    p.id = n;
    for (int i = 0; i < samples; ++i) {
      const double x = x_min + (x_max - x_min) * i / (samples - 1);
      const double d = spec.delta + spec.epsilon * (x - 0.5);
      if (!(d > 0.0)) continue;
      p.points.push_back({-(2.0 * x - 1.0) / (2.0 * s2 * d), 2.0 * kPi * (static_cast<double>(n) + 0.5) / d});
    }
    out.push_back(std::move(p));
  }
  return out;
}

double delta_center(const GaussianSpec& spec, double beta) {
  const double b = beta * spec.delta * spec.sigma * spec.sigma;
  if (1.0 + b == 0.0) throw OutOfValidity("delta_center is singular at this beta");
  return spec.delta + spec.epsilon * b / (1.0 + b);
}

double theta_decay(const GaussianSpec& spec_in, ComplexTime z) {
  const GaussianSpec spec = center_spec(spec_in).spec;
  check_validity(spec, z.beta);
  const double dc = delta_center(spec, z.beta);
  if (!(dc > 0.0)) throw OutOfValidity("non-positive central spacing");
  const cplx num = log_theta3({0.5 * kPi * spec.delta / dc, theta_tau(spec, z.as_complex())});
  const cplx den = log_theta3({0.0, theta_tau(spec, z.beta)});
  return std::exp(num.real() - den.real());
}

AmplitudeValue gaussian_term(const GaussianSpec& spec, int j, ComplexTime z) {
  return to_value(log_term(spec, j, z.as_complex()));
}

BoundedDecomposition bounded_decomposition(const GaussianSpec& spec, ComplexTime z) {
  spec.validate();
  check_validity(spec, z.beta);
  const cplx zc = z.as_complex();
  const double s2 = spec.sigma * spec.sigma;
  const double curvature = (1.0 + z.beta * spec.epsilon * s2) / (2.0 * s2);
  const double jstar = (spec.mu / s2 - z.beta * spec.delta) / (1.0 / s2 + z.beta * spec.epsilon);
  const auto K = static_cast<long>(std::ceil(std::sqrt(45.0 / curvature))) + 2;
  const long lo = std::min<long>(static_cast<long>(std::floor(jstar)) - K, spec.j_min);
  const long hi = std::max<long>(static_cast<long>(std::ceil(jstar)) + K, spec.j_max);
  if (hi - lo > 50000000) throw NumericalError("bounded_decomposition range too large");

  LogSum g, c, u_direct;
  for (long j = lo; j <= hi; ++j) {
    const cplx a = log_term(spec, j, zc);
    u_direct.terms.push_back(a);
    if (j >= spec.j_min && j <= spec.j_max)
      g.terms.push_back(a);
    else
      c.terms.push_back(a);
  }
  // With an integer mu the unbounded sum is a theta function.
  const CenteredSpec cs = center_spec(spec);
  cplx lu;
  if (cs.residual == 0.0)
    lu = -zc * cs.spec.E_GS + log_theta3({theta_u(cs.spec, zc), theta_tau(cs.spec, zc)});
  else
    lu = u_direct.value();
  const cplx lg = g.value(), lc = c.value();

  BoundedDecomposition out;
  out.L_G = to_value(lg);
  out.L_U = to_value(lu);
  out.C = to_value(lc);
  const double ref = std::max(lu.real(), lc.real());
  const cplx diff = std::exp(lg - ref) - (std::exp(lu - ref) - std::exp(lc - ref));
  out.residual = std::abs(diff);
  return out;
}

cplx k_ratio(const GaussianSpec& spec, cplx z) {
  double top = -kInf;
  std::vector<double> lw;
  for (int j = spec.j_min; j <= spec.j_max; ++j) {
    lw.push_back(spec.log_weight(j));
    top = std::max(top, lw.back());
  }
  double norm = 0.0;
  for (double x : lw) norm += std::exp(x - top);
  const double log_norm = top + std::log(norm);

  double shift = -kInf;
  for (int j = spec.j_min; j <= spec.j_max; ++j)
    shift = std::max(shift, lw[static_cast<std::size_t>(j - spec.j_min)] - z.real() * j * spec.delta);
  cplx s1 = 0.0, s2 = 0.0;
  for (int j = spec.j_min; j <= spec.j_max; ++j) {
    const cplx w = std::exp(lw[static_cast<std::size_t>(j - spec.j_min)] - z * (j * spec.delta) - shift);
    s1 += static_cast<double>(j) * w;
    s2 += static_cast<double>(j) * j * w;
  }
  const double den = std::abs(s1) * std::exp(shift - log_norm);
  if (!(den >= 1e-14)) throw SingularK("first-moment sum vanishes at the seed zero");
  return s2 / s1;
}

std::vector<Polyline> zero_trajectories(const GaussianSpec& spec, const std::vector<ComplexTime>& seeds,
                                        long n_min, long n_max) {
  spec.validate();
  std::vector<Polyline> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const cplx z0 = seeds[i].as_complex();
    const cplx factor = 1.0 - spec.epsilon * k_ratio(spec, z0) / (2.0 * spec.delta);
    Polyline p;
    p.id = static_cast<long>(i);
    for (long n = n_min; n <= n_max; ++n) {
      const cplx zn = z0 + cplx(0.0, 2.0 * kPi * static_cast<double>(n) / spec.delta);
      p.points.emplace_back(zn * factor);
    }
    out.push_back(std::move(p));
  }
  return out;
}

GaussianFit fit_gaussian(const EnergyDistribution& dist) {
  const auto k = dist.populations();
  const auto e = dist.energies();
  const std::size_t n = dist.size();
  std::size_t usable = 0;
  for (double x : k)
    if (x > 1e-14) ++usable;
  if (usable < 4) throw IllConditioned("fit_gaussian needs at least four populated levels");

  // Starting point: parabola through ln k, rows weighted by k so the fit
  // follows the populated part of the distribution.
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double jd = static_cast<double>(j);
    const auto r = static_cast<Eigen::Index>(j);
    A(r, 0) = k[j];
    A(r, 1) = k[j] * jd;
    A(r, 2) = k[j] * jd * jd;
    b(r) = k[j] * std::log(k[j]);
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  double mu = 0.0, sigma = 1.0, amp = *std::max_element(k.begin(), k.end());
  if (c(2) < 0.0) {
    sigma = std::sqrt(-1.0 / (2.0 * c(2)));
    mu = c(1) * sigma * sigma;
  } else {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      m1 += k[j] * static_cast<double>(j);
      m2 += k[j] * static_cast<double>(j * j);
    }
    mu = m1;
    sigma = std::sqrt(std::max(m2 - m1 * m1, 0.25));
  }

  // Levenberg-Marquardt on k_j = amp exp(-(j - mu)^2 / (2 sigma^2)).
  Eigen::Vector3d p(amp, mu, sigma);
  auto residuals = [&](const Eigen::Vector3d& q, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    r.resize(static_cast<Eigen::Index>(n));
    if (J) J->resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) - q(1);
      const double g = std::exp(-x * x / (2.0 * q(2) * q(2)));
      const auto i = static_cast<Eigen::Index>(j);
      r(i) = q(0) * g - k[j];
      if (J) {
        (*J)(i, 0) = g;
        (*J)(i, 1) = q(0) * g * x / (q(2) * q(2));
        (*J)(i, 2) = q(0) * g * x * x / (q(2) * q(2) * q(2));
      }
    }
  };
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  residuals(p, r, &J);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < 500; ++it) {
    const Eigen::Matrix3d JtJ = J.transpose() * J;
    const Eigen::Vector3d g = J.transpose() * r;
    Eigen::Matrix3d M = JtJ;
    for (int d = 0; d < 3; ++d) M(d, d) += lambda * std::max(JtJ(d, d), 1e-30);
    const Eigen::Vector3d step = M.ldlt().solve(-g);
    const Eigen::Vector3d trial = p + step;
    Eigen::VectorXd rt;
    residuals(trial, rt, nullptr);
    const double ct = rt.squaredNorm();
    if (std::isfinite(ct) && ct < cost) {
      const double rel = (cost - ct) / std::max(cost, 1e-300);
      p = trial;
      cost = ct;
      residuals(p, r, &J);
      lambda = std::max(lambda / 10.0, 1e-12);
      if (rel < 1e-15 || step.norm() < 1e-14 * (1.0 + p.norm())) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }

  // Energies: E_GS + delta j + (epsilon / 2) j^2, same row weights.
  Eigen::VectorXd be(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) be(static_cast<Eigen::Index>(j)) = k[j] * e[j];
  const Eigen::Vector3d ce = A.colPivHouseholderQr().solve(be);

  GaussianFit fit;
  fit.spec.E_GS = ce(0);
  fit.spec.delta = ce(1);
  fit.spec.epsilon = 2.0 * ce(2);
  fit.spec.mu = p(1);
  fit.spec.sigma = std::abs(p(2));
  fit.spec.j_min = 0;
  int j_max = static_cast<int>(n) - 1;
  while (j_max > 0 && !(fit.spec.spacing(j_max - 1) > 0.0)) --j_max;
  fit.spec.j_max = j_max;

  double pr = 0.0, er = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) - p(1);
    const double model = p(0) * std::exp(-x * x / (2.0 * p(2) * p(2)));
    pr += (model - k[j]) * (model - k[j]);
    const double em = fit.spec.energy(static_cast<double>(j));
    er += (em - e[j]) * (em - e[j]);
  }
  fit.population_rms = std::sqrt(pr / static_cast<double>(n));
  fit.energy_rms = std::sqrt(er / static_cast<double>(n));
  return fit;
}

}  // namespace lzeros
