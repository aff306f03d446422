#include <cmath>
#include <limits>
#include <numbers>

#include "lzeros/errors.hpp"
#include "lzeros/gaussian_model.hpp"

namespace lzeros {
namespace {

constexpr double kPi = std::numbers::pi;

// Half-width J around the dominant index so that the geometric tail bound
// 2 exp(-pi Im(tau) J^2) / (1 - exp(-2 pi Im(tau) J)) drops below 1e-16
// (J measured from the continuous maximum, hence the extra half step).
long theta_half_width(double im_tau) {
  long J = 1;
  for (;; ++J) {
    const double x = static_cast<double>(J) - 0.5;
    const double bound = 2.0 * std::exp(-kPi * im_tau * x * x) / (1.0 - std::exp(-2.0 * kPi * im_tau * x));
    if (bound < 1e-16 && bound >= 0.0) break;
    if (J > 100000000) throw NumericalError("theta series needs too many terms");
  }
  return J + 1;
}

}  // namespace

std::complex<double> log_theta3(const ThetaArgs& args) {
  const double im_tau = args.tau.imag();
  if (!(im_tau > 1e-12)) throw NonConvergent("theta_3 series needs Im(tau) > 0", Rect{});
  // Re of the exponent is -2 j Im(u) - pi Im(tau) j^2, largest near j0.
  const double j0 = -args.u.imag() / (kPi * im_tau);
  if (!std::isfinite(j0) || std::abs(j0) > 1e15) throw NumericalError("theta_3 argument out of range");
  const auto c = static_cast<long>(std::llround(j0));
  const long J = theta_half_width(im_tau);

  auto exponent = [&](long j) {
    const double jd = static_cast<double>(j);
    return std::complex<double>(0.0, 2.0 * jd) * args.u +
           std::complex<double>(0.0, kPi * jd * jd) * args.tau;
  };
  double top = -std::numeric_limits<double>::infinity();
  for (long j = c - J; j <= c + J; ++j) top = std::max(top, exponent(j).real());
  std::complex<double> s = 0.0;
  for (long j = c - J; j <= c + J; ++j) s += std::exp(exponent(j) - top);
  return top + std::log(s);
}

std::complex<double> theta3(const ThetaArgs& args) { return std::exp(log_theta3(args)); }

}  // namespace lzeros
