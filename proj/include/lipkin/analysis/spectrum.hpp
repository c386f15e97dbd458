#pragma once

#include "lipkin/eigen/real_tridiag.hpp"
#include "lipkin/spin.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lipkin {

enum class Selector { even, odd, merged };

inline std::string_view to_string(Selector s) {
  switch (s) {
  case Selector::even: return "even";
  case Selector::odd: return "odd";
  case Selector::merged: return "merged";
  }
  return "merged";
}

inline Selector parse_selector(std::string_view s) {
  if (s == "even") return Selector::even;
  if (s == "odd") return Selector::odd;
  if (s == "merged") return Selector::merged;
  throw std::invalid_argument("unknown sector selector '" + std::string(s) + "'");
}

inline Selector to_selector(Parity p) { return p == Parity::even ? Selector::even : Selector::odd; }

struct Level {
  double energy = 0.0;
  Parity sector = Parity::even;
};

struct Spectrum {
  int n_particles = 0;
  double lambda = 0.0;
  std::vector<double> even_values;
  std::vector<double> odd_values;
  std::vector<Level> merged;

  const std::vector<double>& values(Parity p) const { return p == Parity::even ? even_values : odd_values; }

  std::vector<double> values(Selector s) const {
    if (s == Selector::even) return even_values;
    if (s == Selector::odd) return odd_values;
    std::vector<double> all;
    all.reserve(merged.size());
    for (const auto& l : merged) all.push_back(l.energy);
    return all;
  }
};

/// Both parity blocks solved at real lambda and merged in ascending order.
inline Spectrum full_spectrum(int n_particles, double lambda) {
  Spectrum s;
  s.n_particles = SpinRepresentation(n_particles).n_particles();
  s.lambda = lambda;
  s.even_values = eig_real_tridiag(build_block(n_particles, lambda, Parity::even)).values;
  s.odd_values = eig_real_tridiag(build_block(n_particles, lambda, Parity::odd)).values;
  s.merged.reserve(s.even_values.size() + s.odd_values.size());
  for (double e : s.even_values) s.merged.push_back({e, Parity::even});
  for (double e : s.odd_values) s.merged.push_back({e, Parity::odd});
  std::stable_sort(s.merged.begin(), s.merged.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });
  return s;
}

struct ScaledPoint {
  int k = 0;        // 1-based index within the selection
  double x = 0.0;   // 2k/N on the merged axis
  double eps = 0.0; // 2E/N
  double energy = 0.0;
  Parity sector = Parity::even;
};

struct ScaledSpectrum {
  int n_particles = 0;
  double lambda = 0.0;
  Selector selector = Selector::merged;
  std::vector<ScaledPoint> points;
};

/// Position of sector level k on the merged x-axis: the merged index it has
/// at lambda = 0 (2k-1 for the class containing -j, 2k for the other).
inline double sector_x(int n_particles, Parity p, int k) {
  const int merged_index = 2 * k - (p == Parity::even ? 1 : 0);
  return 2.0 * merged_index / n_particles;
}

/// (x, eps) = (2k/N, 2E/N). With lower_half only points with x <= 1 are kept.
inline ScaledSpectrum scaled_spectrum(const Spectrum& s, Selector sel, bool lower_half = true) {
  ScaledSpectrum out;
  out.n_particles = s.n_particles;
  out.lambda = s.lambda;
  out.selector = sel;
  const double n = s.n_particles;
  if (sel == Selector::merged) {
    for (std::size_t i = 0; i < s.merged.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      const double x = 2.0 * k / n;
      if (lower_half && x > 1.0) break;
      out.points.push_back({k, x, 2.0 * s.merged[i].energy / n, s.merged[i].energy, s.merged[i].sector});
    }
  } else {
    const Parity p = sel == Selector::even ? Parity::even : Parity::odd;
    const auto& vals = s.values(p);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      const double x = sector_x(s.n_particles, p, k);
      if (lower_half && x > 1.0) break;
      out.points.push_back({k, x, 2.0 * vals[i] / n, vals[i], p});
    }
  }
  return out;
}

/// E_{k+1} - E_k for the selected levels.
inline std::vector<double> gaps(const Spectrum& s, Selector sel) {
  const auto v = s.values(sel);
  if (v.size() < 2) throw std::invalid_argument("gaps: selection has fewer than two levels");
  std::vector<double> g(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) g[i] = v[i + 1] - v[i];
  return g;
}

struct MinGap {
  int k = 0; // gap between levels k and k+1 (1-based)
  double gap = 0.0;
};

/// Smallest gap whose lower level lies in the lower half; first index wins ties.
inline MinGap min_gap(const Spectrum& s, Selector sel) {
  const auto g = gaps(s, sel);
  const auto half = scaled_spectrum(s, sel, true).points.size();
  const std::size_t limit = std::clamp<std::size_t>(half, 1, g.size());
  MinGap best{1, g[0]};
  for (std::size_t i = 1; i < limit; ++i)
    if (g[i] < best.gap) best = {static_cast<int>(i) + 1, g[i]};
  return best;
}

/// First upward crossing of `level` by the piecewise-linear curve (xs, ys),
/// or nullopt when the curve starts above it or never reaches it.
inline std::optional<double> upward_crossing(const std::vector<double>& xs, const std::vector<double>& ys,
                                             double level) {
  if (xs.empty() || ys.front() >= level) return std::nullopt;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (ys[i] < level && ys[i + 1] >= level)
      return xs[i] + (xs[i + 1] - xs[i]) * (level - ys[i]) / (ys[i + 1] - ys[i]);
  }
  return std::nullopt;
}

/// x at which the merged scaled spectrum crosses the critical line eps = -1.
/// lambda = 1 is the touch point and returns 0.
inline double critical_x(const Spectrum& s) {
  if (s.lambda < 1.0) throw std::domain_error("critical_x: no crossing of eps = -1 for lambda < 1");
  if (s.lambda == 1.0) return 0.0;
  const auto ss = scaled_spectrum(s, Selector::merged, false);
  std::vector<double> xs, ys;
  for (const auto& p : ss.points) {
    xs.push_back(p.x);
    ys.push_back(p.eps);
  }
  const auto xc = upward_crossing(xs, ys, -1.0);
  if (!xc) throw std::domain_error("critical_x: spectrum does not cross eps = -1 at N = " +
                                   std::to_string(s.n_particles));
  return *xc;
}

inline double critical_x(int n_particles, double lambda) {
  if (lambda < 1.0) throw std::domain_error("critical_x: no crossing of eps = -1 for lambda < 1");
  if (lambda == 1.0) return 0.0;
  return critical_x(full_spectrum(n_particles, lambda));
}

struct DerivativePoint {
  double x_mid = 0.0;
  double slope = 0.0;
};

/// Finite differences d eps / d x between consecutive scaled points.
inline std::vector<DerivativePoint> spectral_derivative(const ScaledSpectrum& ss) {
  if (ss.points.size() < 2) throw std::invalid_argument("spectral_derivative: need at least two points");
  std::vector<DerivativePoint> d;
  d.reserve(ss.points.size() - 1);
  for (std::size_t i = 0; i + 1 < ss.points.size(); ++i) {
    const auto& a = ss.points[i];
    const auto& b = ss.points[i + 1];
    d.push_back({0.5 * (a.x + b.x), (b.eps - a.eps) / (b.x - a.x)});
  }
  return d;
}

/// eps_k(lambda) for one sector level over a lambda grid.
inline std::vector<double> level_curve(int n_particles, Parity p, int k, const std::vector<double>& lambdas) {
  std::vector<double> eps;
  eps.reserve(lambdas.size());
  for (double l : lambdas) {
    const auto r = eig_real_tridiag(build_block(n_particles, l, p));
    if (k < 1 || static_cast<std::size_t>(k) > r.values.size())
      throw std::invalid_argument("level_curve: level index out of range");
    eps.push_back(2.0 * r.values[static_cast<std::size_t>(k) - 1] / n_particles);
  }
  return eps;
}

/// lambda at which a fixed level crosses eps = -1 (levels descend with lambda).
inline double critical_lambda(const std::vector<double>& lambdas, const std::vector<double>& eps) {
  std::vector<double> neg(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) neg[i] = -eps[i];
  const auto lc = upward_crossing(lambdas, neg, 1.0);
  if (!lc) throw std::domain_error("critical_lambda: level does not cross eps = -1 on the grid");
  return *lc;
}

} // namespace lipkin
