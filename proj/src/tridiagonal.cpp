#include "tridiagonal.hpp"

#include <cmath>
#include <limits>

#include "lzeros/errors.hpp"

namespace lzeros::detail {

void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, std::vector<double>& row) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e.resize(static_cast<std::size_t>(n), 0.0);
  e[static_cast<std::size_t>(n - 1)] = 0.0;
  const bool track = !row.empty();
  const double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 100) throw NumericalError("tridiagonal QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (track) {
            f = row[i + 1];
            row[i + 1] = s * row[i] + c * f;
            row[i] = c * row[i] - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

std::vector<double> tridiagonal_lowest_vector(const std::vector<double>& d,
                                              const std::vector<double>& e, double lambda) {
  const std::size_t n = d.size();
  double scale = std::abs(lambda);
  for (double x : d) scale = std::max(scale, std::abs(x));
  // Shift slightly below lambda so T - sigma is positive definite and the
  // elimination below needs no pivoting.
  const double sigma = lambda - 1e-11 * std::max(scale, 1.0);
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> diag(n), y(n);
  for (int it = 0; it < 4; ++it) {
    for (std::size_t i = 0; i < n; ++i) diag[i] = d[i] - sigma;
    y = x;
    for (std::size_t i = 1; i < n; ++i) {
      const double w = e[i - 1] / diag[i - 1];
      diag[i] -= w * e[i - 1];
      y[i] -= w * y[i - 1];
    }
    y[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) y[i] = (y[i] - e[i] * y[i + 1]) / diag[i];
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
  }
  return x;
}

}  // namespace lzeros::detail
