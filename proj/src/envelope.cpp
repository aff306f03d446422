#include "lzeros/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "lzeros/errors.hpp"

namespace lzeros {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Height of point p above the chord through a and b, in ln k units.
double above_chord(double xa, double ya, double xb, double yb, double xp, double yp) {
  const double chord = ya + (yb - ya) * (xp - xa) / (xb - xa);
  return yp - chord;
}

// Integer range of n with t_min <= period (n + offset) < t_max.
std::pair<long, long> chain_range(double period, double offset, double t_min, double t_max) {
  const long lo = static_cast<long>(std::ceil(t_min / period - offset - 1e-12));
  const long hi = static_cast<long>(std::floor(t_max / period - offset + 1e-12));
  return {lo, hi};
}

}  // namespace

Envelope envelope_from_members(const EnergyDistribution& dist, std::vector<std::size_t> members,
                               const EnvelopeOptions& options) {
  if (members.empty()) throw InvalidArgument("envelope needs at least one member");
  for (std::size_t m : members)
    if (m >= dist.size()) throw InvalidArgument("envelope member index out of range");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  Envelope env;
  env.members = std::move(members);
  const auto e = dist.energies();
  const auto lk = dist.log_populations();
  for (std::size_t m : env.members) {
    env.member_energies.push_back(e[m]);
    env.member_populations.push_back(dist.population(m));
  }

  const std::size_t n = env.members.size();
  auto x = [&](std::size_t i) { return e[env.members[i]]; };
  auto y = [&](std::size_t i) { return lk[env.members[i]]; };

  std::size_t i = 0;
  while (i + 1 < n) {
    // Grow the run [i, j] while every interior point stays on the chord.
    std::size_t j = i + 1;
    while (j + 1 < n) {
      bool collinear = true;
      for (std::size_t l = i + 1; l <= j; ++l) {
        if (std::abs(above_chord(x(i), y(i), x(j + 1), y(j + 1), x(l), y(l))) >
            options.collinear_tolerance) {
          collinear = false;
          break;
        }
      }
      if (!collinear) break;
      ++j;
    }

    long group_id = -1;
    if (j > i + 1) {
      MultilevelGroup g;
      for (std::size_t l = i; l <= j; ++l) g.levels.push_back(env.members[l]);
      const double e0 = x(i), em = x(j);
      g.kappa = std::exp(y(i) - y(j));
      g.beta = (y(i) - y(j)) / (e0 - em);
      g.period = kTwoPi / (em - e0);
      // kappa0 = k_{j0} kappa^(-E_{j0} / (E_{j0} - E_{jm}))
      g.kappa0 = std::exp(y(i) - std::log(g.kappa) * e0 / (e0 - em));
      const double mean_spacing = (em - e0) / static_cast<double>(j - i);
      g.equidistant = true;
      for (std::size_t l = i; l < j; ++l) {
        const double s = x(l + 1) - x(l);
        if (std::abs(s - mean_spacing) > options.equidistant_tolerance * mean_spacing) {
          g.equidistant = false;
          break;
        }
      }
      g.spacing = g.equidistant ? mean_spacing : 0.0;
      group_id = static_cast<long>(env.groups.size());
      env.groups.push_back(std::move(g));
    }
    for (std::size_t l = i; l < j; ++l) {
      Segment s;
      s.a = env.members[l];
      s.b = env.members[l + 1];
      s.beta = (y(l) - y(l + 1)) / (x(l) - x(l + 1));
      s.period = kTwoPi / (x(l + 1) - x(l));
      s.group = group_id;
      env.segments.push_back(s);
    }
    i = j;
  }
  return env;
}

Envelope compute_envelope(const EnergyDistribution& dist, const EnvelopeOptions& options) {
  const auto e = dist.energies();
  const auto lk = dist.log_populations();
  std::vector<std::size_t> hull;
  hull.reserve(dist.size());
  for (std::size_t p = 0; p < dist.size(); ++p) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      if (above_chord(e[a], lk[a], e[p], lk[p], e[b], lk[b]) < -options.collinear_tolerance)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return envelope_from_members(dist, std::move(hull), options);
}

ZeroSet approximate_zeros(const Envelope& env, const SearchWindow& window) {
  ZeroSet out;
  out.window = window.rect();
  const Rect r = window.rect();
  auto in_beta = [&](double b) { return b >= r.beta_min && b < r.beta_max; };
  auto push = [&](double beta, double t, long chain, bool multilevel) {
    if (!r.contains(beta, t)) return;
    Zero z;
    z.z = {beta, t};
    z.provenance = Provenance::approximate;
    z.chain_id = chain;
    z.multilevel = multilevel;
    out.zeros.push_back(z);
  };

  std::vector<bool> group_done(env.groups.size(), false);
  for (std::size_t si = 0; si < env.segments.size(); ++si) {
    const Segment& s = env.segments[si];
    const long chain = static_cast<long>(si);
    if (s.group < 0) {
      if (!in_beta(s.beta)) continue;
      const auto [lo, hi] = chain_range(s.period, 0.5, r.t_min, r.t_max);
      for (long k = lo; k <= hi; ++k) push(s.beta, s.period * (static_cast<double>(k) + 0.5), chain, false);
      continue;
    }
    const auto gi = static_cast<std::size_t>(s.group);
    if (group_done[gi]) continue;
    group_done[gi] = true;
    const MultilevelGroup& g = env.groups[gi];
    if (!in_beta(g.beta)) continue;
    if (g.equidistant) {
      // Roots of the geometric sum 1 + x + ... + x^m on |x| = 1.
      const long m = static_cast<long>(g.levels.size()) - 1;
      const double period = kTwoPi / g.spacing;
      for (long n0 = 1; n0 <= m; ++n0) {
        const double frac = static_cast<double>(n0) / static_cast<double>(m + 1);
        const auto [lo, hi] = chain_range(period, frac, r.t_min, r.t_max);
        for (long k = lo; k <= hi; ++k) push(g.beta, period * (static_cast<double>(k) + frac), chain, false);
      }
    } else {
      const auto [lo, hi] = chain_range(g.period, 0.5, r.t_min, r.t_max);
      for (long k = lo; k <= hi; ++k) push(g.beta, g.period * (static_cast<double>(k) + 0.5), chain, true);
    }
  }
  out.sort();
  return out;
}

EnvelopeDiagnostics diagnostics(const Envelope& env) {
  EnvelopeDiagnostics d;
  const auto& k = env.member_populations;
  if (k.empty()) return d;
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < k.size(); ++i)
    if (k[i] > k[i1]) i1 = i;
  d.max_index = env.members[i1];
  if (k.size() < 2) {
    d.ratio_R = 0.0;
    return d;
  }
  double k2 = -1.0;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (i != i1) k2 = std::max(k2, k[i]);
  d.ratio_R = k2 / k[i1];
  for (const auto& g : env.groups) {
    const bool has_max = std::find(g.levels.begin(), g.levels.end(), d.max_index) != g.levels.end();
    if (has_max && std::abs(std::log(g.kappa)) <= 1e-9) d.multilevel_at_axis = true;
  }
  return d;
}

bool monotonicity_check(const Envelope& env) {
  for (std::size_t si = 0; si < env.segments.size(); ++si) {
    const Segment& s = env.segments[si];
    const auto ia = std::find(env.members.begin(), env.members.end(), s.a) - env.members.begin();
    const auto ib = std::find(env.members.begin(), env.members.end(), s.b) - env.members.begin();
    const double ka = env.member_populations[static_cast<std::size_t>(ia)];
    const double kb = env.member_populations[static_cast<std::size_t>(ib)];
    const int sk = (kb > ka) - (kb < ka);
    const int sb = (s.beta > 0.0) - (s.beta < 0.0);
    if (sk != sb) return false;
  }
  return true;
}

std::string Envelope::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["members"] = members;
  j["member_energies"] = member_energies;
  j["member_populations"] = member_populations;
  auto segs = nlohmann::ordered_json::array();
  for (const auto& s : segments) {
    segs.push_back({{"a", s.a}, {"b", s.b}, {"beta", s.beta}, {"period", s.period},
                    {"group", s.group}});
  }
  j["segments"] = std::move(segs);
  auto grps = nlohmann::ordered_json::array();
  for (const auto& g : groups) {
    grps.push_back({{"levels", g.levels},
                    {"kappa", g.kappa},
                    {"kappa0", g.kappa0},
                    {"beta", g.beta},
                    {"period", g.period},
                    {"equidistant", g.equidistant},
                    {"spacing", g.spacing}});
  }
  j["groups"] = std::move(grps);
  return j.dump(indent);
}

}  // namespace lzeros
