#include "lzeros/zero_finder.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lzeros/errors.hpp"

namespace lzeros {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxStep = kPi / 2.0;

struct Sample {
  cplx z;
  LogSample s;
};

double wrap(double d) {
  d = std::remainder(d, kTwoPi);
  return d;
}

class ContourTracker {
 public:
  ContourTracker(const AmplitudeFunction& f, const ContourOptions& o, const Rect& ctx)
      : f_(f), o_(o), ctx_(ctx) {}

  Sample eval(cplx z) const {
    Sample s{z, f_(z)};
    if (!std::isfinite(s.s.log_modulus) || !std::isfinite(s.s.phase))
      throw NonConvergent("amplitude vanishes on the contour", ctx_);
    return s;
  }

  // Phase change of f along the straight segment a -> b.
  double segment(cplx a, cplx b) const {
    const int n = std::max(1, o_.initial_samples);
    Sample prev = eval(a);
    double total = 0.0;
    for (int i = 1; i <= n; ++i) {
      const cplx z = i == n ? b : a + (b - a) * (static_cast<double>(i) / n);
      Sample cur = eval(z);
      total += refine(prev, cur, 0);
      prev = cur;
    }
    return total;
  }

 private:
  double refine(const Sample& a, const Sample& b, int depth) const {
    const double d = wrap(b.s.phase - a.s.phase);
    bool ok = std::abs(d) <= kMaxStep;
    if (ok) {
      // The local derivative predicts the phase step from either end; a
      // large prediction means the sampled step may have aliased.
      const cplx dz = b.z - a.z;
      const double pa = std::imag(a.s.dlog * dz);
      const double pb = std::imag(b.s.dlog * dz);
      if ((std::isfinite(pa) && std::abs(pa) > kMaxStep) ||
          (std::isfinite(pb) && std::abs(pb) > kMaxStep))
        ok = false;
      // Calm end derivatives can hide a full turn in the middle of a long
      // step; the log increment must also agree with the trapezoid rule.
      const cplx trap = 0.5 * (a.s.dlog + b.s.dlog) * dz;
      if (ok && std::isfinite(trap.real()) && std::isfinite(trap.imag()) &&
          std::abs(cplx(b.s.log_modulus - a.s.log_modulus, d) - trap) > kMaxStep / 2.0)
        ok = false;
    }
    if (ok) return d;
    if (depth >= o_.max_bisection_depth)
      throw NonConvergent("phase tracking exceeded the bisection depth limit", ctx_);
    const Sample m = eval(0.5 * (a.z + b.z));
    return refine(a, m, depth + 1) + refine(m, b, depth + 1);
  }

  const AmplitudeFunction& f_;
  ContourOptions o_;
  Rect ctx_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return splitmix(splitmix(splitmix(splitmix(a) ^ b) ^ c) ^ d);
}

struct Cell {
  Rect rect;
  int winding = 0;
};

bool near_integer(double w, double threshold) {
  return std::abs(w - std::round(w)) <= threshold;
}

// Winding numbers of the k x k children of `cell` for the given gridlines.
// Returns false when a child is not close to a non-negative integer or the
// children do not add up to the parent.
bool subdivide(const ContourTracker& tr, const Cell& cell, const std::vector<double>& xs,
               const std::vector<double>& ys, double threshold, std::vector<Cell>& out) {
  const std::size_t k = xs.size() - 1;
  // h[i][j]: along t = ys[i] from xs[j] to xs[j+1]
  // v[i][j]: along beta = xs[j] from ys[i] to ys[i+1]
  std::vector<std::vector<double>> h(k + 1, std::vector<double>(k));
  std::vector<std::vector<double>> v(k, std::vector<double>(k + 1));
  for (std::size_t i = 0; i <= k; ++i)
    for (std::size_t j = 0; j < k; ++j) h[i][j] = tr.segment({xs[j], ys[i]}, {xs[j + 1], ys[i]});
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= k; ++j) v[i][j] = tr.segment({xs[j], ys[i]}, {xs[j], ys[i + 1]});

  std::vector<Cell> children;
  long sum = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double w = (h[i][j] + v[i][j + 1] - h[i + 1][j] - v[i][j]) / kTwoPi;
      if (!near_integer(w, threshold)) return false;
      const long n = std::lround(w);
      if (n < 0) return false;
      sum += n;
      if (n > 0) children.push_back({Rect{xs[j], xs[j + 1], ys[i], ys[i + 1]}, static_cast<int>(n)});
    }
  }
  if (sum != cell.winding) return false;
  out.insert(out.end(), children.begin(), children.end());
  return true;
}

std::vector<double> gridlines(double lo, double hi, std::size_t k, std::mt19937_64* rng) {
  std::vector<double> g(k + 1);
  const double step = (hi - lo) / static_cast<double>(k);
  for (std::size_t i = 0; i <= k; ++i) g[i] = lo + step * static_cast<double>(i);
  g[k] = hi;
  if (rng) {
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (std::size_t i = 1; i < k; ++i) g[i] += u(*rng) * step;
  }
  return g;
}

std::vector<Cell> split_cell(const AmplitudeFunction& f, const ContourOptions& co,
                             const SearchWindow& win, const Cell& cell, int depth,
                             std::size_t index) {
  const ContourTracker tr(f, co, cell.rect);
  const auto k = static_cast<std::size_t>(win.grid_k);
  for (int attempt = 0; attempt <= win.max_jitter; ++attempt) {
    std::mt19937_64 rng(mix(win.seed, static_cast<std::uint64_t>(depth), index,
                            static_cast<std::uint64_t>(attempt)));
    std::mt19937_64* jitter = attempt == 0 ? nullptr : &rng;
    const auto xs = gridlines(cell.rect.beta_min, cell.rect.beta_max, k, jitter);
    const auto ys = gridlines(cell.rect.t_min, cell.rect.t_max, k, jitter);
    std::vector<Cell> out;
    try {
      if (subdivide(tr, cell, xs, ys, win.winding_threshold, out)) return out;
    } catch (const NonConvergent&) {
      // retry with moved gridlines
    }
  }
  throw NonConvergent("subdivision failed after gridline jitter", cell.rect);
}

}  // namespace

double winding_number(const AmplitudeFunction& f, const Rect& rect, const ContourOptions& options) {
  const ContourTracker tr(f, options, rect);
  const cplx a{rect.beta_min, rect.t_min}, b{rect.beta_max, rect.t_min};
  const cplx c{rect.beta_max, rect.t_max}, d{rect.beta_min, rect.t_max};
  const double total = tr.segment(a, b) + tr.segment(b, c) - tr.segment(d, c) - tr.segment(a, d);
  return total / kTwoPi;
}

double winding_number(const EnergyDistribution& dist, const Rect& rect,
                      const ContourOptions& options) {
  return winding_number(amplitude_function(dist), rect, options);
}

ZeroSet find_zeros(const AmplitudeFunction& f, const SearchWindow& window) {
  window.validate();
  const ContourOptions co{window.initial_samples, window.max_bisection_depth};
  const double resolution = window.resolution();

  // Top-level winding, expanding the window slightly when its boundary
  // passes through (or too close to) a zero.
  Rect top = window.rect();
  std::mt19937_64 rng(mix(window.seed, 0xfeedULL, 0, 0));
  std::uniform_real_distribution<double> grow(1e-3, 3e-3);
  int top_winding = -1;
  for (int attempt = 0; attempt <= window.max_jitter; ++attempt) {
    if (attempt > 0) {
      const Rect base = window.rect();
      const double diag = base.diagonal();
      top = Rect{base.beta_min - grow(rng) * diag, base.beta_max + grow(rng) * diag,
                 base.t_min - grow(rng) * diag, base.t_max + grow(rng) * diag};
    }
    try {
      const double w = winding_number(f, top, co);
      if (near_integer(w, window.winding_threshold) && std::lround(w) >= 0) {
        top_winding = static_cast<int>(std::lround(w));
        break;
      }
    } catch (const NonConvergent&) {
    }
  }
  if (top_winding < 0) throw NonConvergent("window boundary could not be resolved", window.rect());

  ZeroSet out;
  out.window = top;
  out.seed = window.seed;

  std::vector<Cell> frontier;
  if (top_winding > 0) frontier.push_back({top, top_winding});
  int depth = 0;
  while (!frontier.empty()) {
    ++depth;
    std::vector<std::vector<Cell>> next(frontier.size());
    std::vector<std::exception_ptr> errors(frontier.size());
    const long n = static_cast<long>(frontier.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
      const Cell& cell = frontier[static_cast<std::size_t>(i)];
      if (cell.rect.diagonal() <= resolution) continue;
      try {
        next[static_cast<std::size_t>(i)] =
            split_cell(f, co, window, cell, depth, static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    std::vector<Cell> children;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const Cell& cell = frontier[i];
      if (cell.rect.diagonal() <= resolution) {
        Zero z;
        z.z = {0.5 * (cell.rect.beta_min + cell.rect.beta_max),
               0.5 * (cell.rect.t_min + cell.rect.t_max)};
        z.multiplicity = cell.winding;
        z.provenance = Provenance::exact;
        out.zeros.push_back(z);
      } else {
        children.insert(children.end(), next[i].begin(), next[i].end());
      }
    }
    frontier = std::move(children);
  }
  out.sort();
  return out;
}

ZeroSet find_zeros(const EnergyDistribution& dist, const SearchWindow& window) {
  return find_zeros(amplitude_function(dist), window);
}

namespace {

double log_sum_exp(const std::vector<double>& a) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : a) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : a) s += std::exp(x - m);
  return m + std::log(s);
}

// Root of an increasing function by bracketing and bisection.
template <class F>
double increasing_root(F f) {
  double lo = -1.0, hi = 1.0;
  while (f(lo) > 0.0) {
    lo *= 2.0;
    if (lo < -1e300) throw NumericalError("edge strip root not bracketed");
  }
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("edge strip root not bracketed");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EdgeStrip edge_strip(const EnergyDistribution& dist) {
  if (dist.size() < 2) throw InvalidArgument("edge_strip needs at least two levels");
  const auto e = dist.energies();
  const auto lk = dist.log_populations();
  const std::size_t d = dist.size() - 1;
  std::vector<double> buf(d);

  // log r_0 - log sum_{j>0} r_j grows with beta.
  auto high = [&](double beta) {
    for (std::size_t j = 1; j <= d; ++j) buf[j - 1] = lk[j] - e[j] * beta;
    return (lk[0] - e[0] * beta) - log_sum_exp(buf);
  };
  // log sum_{j<d} r_j - log r_d grows with beta.
  auto low = [&](double beta) {
    for (std::size_t j = 0; j < d; ++j) buf[j] = lk[j] - e[j] * beta;
    return log_sum_exp(buf) - (lk[d] - e[d] * beta);
  };
  EdgeStrip s;
  s.beta_high = increasing_root(high);
  s.beta_low = increasing_root(low);
  return s;
}

}  // namespace lzeros
