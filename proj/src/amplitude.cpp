#include "lzeros/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lzeros/errors.hpp"
#include "lzeros/simd/term_sums.hpp"

namespace lzeros {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// A sum carries an absolute error of about eps * sum_j w_j (1 + |E_j t|),
// dominated by the rounded phases. Below 1e4 times that bound fewer than about
// four significant digits remain and the sum is redone in long double, then in
// quad precision if long double falls short as well.
constexpr double kDigits = 1e4 * std::numeric_limits<double>::epsilon();
constexpr double kExtendedDigits = 1e4 * static_cast<double>(std::numeric_limits<long double>::epsilon());

double rounding_scale(const std::vector<double>& log_w, const std::vector<double>& energies, double beta,
                      double t, double shift) {
  double s = 0.0;
  for (std::size_t j = 0; j < log_w.size(); ++j)
    s += std::exp(log_w[j] - energies[j] * beta - shift) * (1.0 + std::abs(energies[j] * t));
  return s;
}

AmplitudeValue from_sums(const simd::TermSums& s, double extra_log = 0.0) {
  if (!std::isfinite(s.shift)) return {-kInf, 0.0};
  const double mod = std::abs(s.value);
  if (mod == 0.0) return {-kInf, 0.0};
  return {s.shift + std::log(mod) - extra_log, std::arg(s.value)};
}

}  // namespace

AmplitudeValue evaluate(const EnergyDistribution& dist, ComplexTime z) {
  return from_sums(simd::term_sums(dist.log_populations(), dist.energies(), z.beta, z.t));
}

AmplitudeValue evaluate_normalized(const EnergyDistribution& dist, ComplexTime z) {
  const auto s = simd::term_sums(dist.log_populations(), dist.energies(), z.beta, z.t);
  if (!std::isfinite(s.shift) || s.magnitude <= 0.0) return {-kInf, 0.0};
  const double mod = std::abs(s.value);
  if (mod == 0.0) return {-kInf, 0.0};
  // Both sums share the same shift, so it cancels in the ratio.
  return {std::log(mod) - std::log(s.magnitude), std::arg(s.value)};
}

double rate_function(const EnergyDistribution& dist, double t, std::optional<int> sites) {
  if (sites && *sites <= 0) throw InvalidArgument("rate_function: sites must be positive");
  const auto v = evaluate_normalized(dist, {0.0, t});
  const double r = -v.log_modulus;
  return sites ? r / static_cast<double>(*sites) : r;
}

double ipr(const EnergyDistribution& dist) {
  double s = 0.0;
  for (double k : dist.populations()) s += k * k;
  return std::sqrt(s);
}

PerturbationScale perturbation_scale(const EnergyDistribution& dist, std::size_t a,
                                     std::size_t b) {
  if (a >= dist.size() || b >= dist.size())
    throw InvalidArgument("perturbation_scale: level index out of range");
  if (a == b) throw InvalidArgument("perturbation_scale: levels a and b must differ");
  PerturbationScale out;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j == a || j == b) continue;
    out.s_ab += dist.population(j) * dist.population(j);
  }
  out.rayleigh_mode = std::sqrt(out.s_ab) / 2.0;
  return out;
}

AmplitudeFunction amplitude_function(const EnergyDistribution& dist) {
  return sum_function({dist.log_populations().begin(), dist.log_populations().end()},
                      {dist.energies().begin(), dist.energies().end()});
}

AmplitudeFunction sum_function(std::vector<double> log_weights, std::vector<double> energies) {
  if (log_weights.size() != energies.size() || energies.empty())
    throw InvalidArgument("sum_function needs matching, non-empty weight and energy lists");
  struct Data {
    std::vector<double> log_w;
    std::vector<double> energies;
    double max_energy = 0.0;
  };
  auto data = std::make_shared<Data>();
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  const double center = 0.5 * (*lo + *hi);
  for (double& e : energies) e -= center;
  data->log_w = std::move(log_weights);
  data->energies = std::move(energies);
  for (double e : data->energies) data->max_energy = std::max(data->max_energy, std::abs(e));

  return [data](std::complex<double> z) -> LogSample {
    auto s = simd::term_sums(data->log_w, data->energies, z.real(), z.imag());
    const double mod0 = std::abs(s.value);
    if (std::isfinite(s.shift) && mod0 <= kDigits * s.magnitude * (1.0 + data->max_energy * std::abs(z.imag()))) {
      const double scale = rounding_scale(data->log_w, data->energies, z.real(), z.imag(), s.shift);
      if (mod0 <= kDigits * scale) {
        s = simd::term_sums_extended(data->log_w, data->energies, z.real(), z.imag());
        if (std::abs(s.value) <= kExtendedDigits * scale)
          s = simd::term_sums_precise(data->log_w, data->energies, z.real(), z.imag());
      }
    }
    LogSample out;
    const double mod = std::abs(s.value);
    if (!std::isfinite(s.shift) || mod == 0.0) {
      out.log_modulus = -kInf;
      out.dlog = {std::numeric_limits<double>::quiet_NaN(), 0.0};
      return out;
    }
    out.log_modulus = s.shift + std::log(mod);
    out.phase = std::arg(s.value);
    out.dlog = -s.moment / s.value;
    return out;
  };
}

}  // namespace lzeros
