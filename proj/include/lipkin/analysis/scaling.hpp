#pragma once

#include "lipkin/analysis/spectrum.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lipkin {

enum class ScalingLaw {
  gap_vs_n,   // Delta E_k ~ N^{-1/3} at lambda = 1, fixed k
  gap_vs_k,   // the same law read at fixed N across k
  gap_ratio,  // Delta E_min ln N / (2 pi sqrt(lambda^2 - 1))
};

inline std::string_view to_string(ScalingLaw law) {
  switch (law) {
  case ScalingLaw::gap_vs_n: return "eq2";
  case ScalingLaw::gap_vs_k: return "eq2-k";
  case ScalingLaw::gap_ratio: return "eq3";
  }
  return "eq2";
}

inline ScalingLaw parse_scaling_law(std::string_view s) {
  if (s == "eq2") return ScalingLaw::gap_vs_n;
  if (s == "eq2-k") return ScalingLaw::gap_vs_k;
  if (s == "eq3") return ScalingLaw::gap_ratio;
  throw std::invalid_argument("unknown scaling law '" + std::string(s) + "'");
}

struct ScalingSample {
  int n = 0;         // N, or k for gap_vs_k
  double gap = 0.0;
  double value = 0.0; // gap for the exponent laws, r(N) for gap_ratio
};

struct ScalingReport {
  ScalingLaw law = ScalingLaw::gap_vs_n;
  double lambda = 1.0;
  int k = 1;         // fixed k (gap_vs_n) or fixed N (gap_vs_k); unused for gap_ratio
  std::vector<ScalingSample> samples;
  std::optional<double> slope;     // log-log regression
  std::optional<double> intercept;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of log y on log x.
inline LineFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("log_log_fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("log_log_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::domain_error("log_log_fit: non-positive sample");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("log_log_fit: all abscissae equal");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

namespace detail {

inline void require_increasing(const std::vector<int>& ns, int min_size = 2) {
  if (static_cast<int>(ns.size()) < min_size) throw std::invalid_argument("scaling: need at least two samples");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw std::invalid_argument("scaling: sample list must be strictly increasing");
}

// Runs f(n) for every n concurrently; results keep the order of ns.
template <class F>
auto map_ordered(const std::vector<int>& ns, F f) {
  using R = decltype(f(0));
  std::vector<std::future<R>> futures;
  futures.reserve(ns.size());
  for (int n : ns) futures.push_back(std::async(std::launch::async, f, n));
  std::vector<R> out;
  out.reserve(ns.size());
  for (auto& fu : futures) out.push_back(fu.get());
  return out;
}

inline double sector_gap_at(int n_particles, double lambda, int k) {
  const auto v = eig_real_tridiag(build_block(n_particles, lambda, Parity::even)).values;
  if (static_cast<std::size_t>(k) >= v.size())
    throw std::invalid_argument("scaling: sector too small for gap index " + std::to_string(k));
  return v[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(k) - 1];
}

} // namespace detail

/// Builds the regression report from already measured gaps; the path the
/// physical sweeps go through.
inline ScalingReport exponent_report(ScalingLaw law, double lambda, int fixed, const std::vector<int>& abscissae,
                                     const std::vector<double>& gaps) {
  detail::require_increasing(abscissae);
  if (gaps.size() != abscissae.size()) throw std::invalid_argument("scaling: gap count mismatch");
  ScalingReport r;
  r.law = law;
  r.lambda = lambda;
  r.k = fixed;
  std::vector<double> xs;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    r.samples.push_back({abscissae[i], gaps[i], gaps[i]});
    xs.push_back(abscissae[i]);
  }
  const auto fit = log_log_fit(xs, gaps);
  r.slope = fit.slope;
  r.intercept = fit.intercept;
  return r;
}

/// Delta E_k = E_{k+1} - E_k in the sector holding the ground state, at
/// lambda = 1, regressed against N. Expected slope -1/3.
inline ScalingReport scaling_exponent_eq2(int k, const std::vector<int>& n_list, double lambda = 1.0) {
  if (k < 1) throw std::invalid_argument("scaling: k must be positive");
  detail::require_increasing(n_list);
  for (int n : n_list)
    if (n < 2 * k + 2) throw std::invalid_argument("scaling: N must be at least 2k+2");
  auto g = detail::map_ordered(n_list, [&](int n) { return detail::sector_gap_at(n, lambda, k); });
  return exponent_report(ScalingLaw::gap_vs_n, lambda, k, n_list, g);
}

/// The same law at fixed N, regressed against k.
inline ScalingReport scaling_exponent_eq2_in_k(int n_particles, const std::vector<int>& k_list, double lambda = 1.0) {
  detail::require_increasing(k_list);
  const auto v = eig_real_tridiag(build_block(n_particles, lambda, Parity::even)).values;
  std::vector<double> g;
  for (int k : k_list) {
    if (k < 1 || static_cast<std::size_t>(k) >= v.size())
      throw std::invalid_argument("scaling: gap index out of range");
    g.push_back(v[static_cast<std::size_t>(k)] - v[static_cast<std::size_t>(k) - 1]);
  }
  return exponent_report(ScalingLaw::gap_vs_k, lambda, n_particles, k_list, g);
}

inline double eq3_gap(double lambda, int n_particles) {
  return 2.0 * std::numbers::pi * std::sqrt(lambda * lambda - 1.0) / std::log(static_cast<double>(n_particles));
}

inline ScalingReport ratio_report(double lambda, const std::vector<int>& n_list, const std::vector<double>& gaps) {
  if (!(lambda > 1.0)) throw std::domain_error("gap ratio: needs lambda > 1");
  detail::require_increasing(n_list);
  if (gaps.size() != n_list.size()) throw std::invalid_argument("scaling: gap count mismatch");
  ScalingReport r;
  r.law = ScalingLaw::gap_ratio;
  r.lambda = lambda;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    r.samples.push_back({n_list[i], gaps[i], gaps[i] / eq3_gap(lambda, n_list[i])});
  return r;
}

/// r(N) = Delta E_min ln N / (2 pi sqrt(lambda^2 - 1)) with the minimum
/// same-sector gap of the lower half of the ground-state sector.
inline ScalingReport gap_ratio_eq3(double lambda, const std::vector<int>& n_list) {
  if (!(lambda > 1.0)) throw std::domain_error("gap ratio: needs lambda > 1");
  detail::require_increasing(n_list);
  auto g = detail::map_ordered(n_list, [&](int n) {
    Spectrum s;
    s.n_particles = n;
    s.lambda = lambda;
    s.even_values = eig_real_tridiag(build_block(n, lambda, Parity::even)).values;
    return min_gap(s, Selector::even).gap;
  });
  return ratio_report(lambda, n_list, g);
}

/// Lowest excitation quantum, the quantity the mean-field ladder describes:
/// below lambda = 1 consecutive levels alternate between sectors, so the
/// quantum is the merged E_2 - E_1; above it levels pair into near-degenerate
/// doublets and the quantum is the same-sector E_2 - E_1.
inline double lowest_excitation(const Spectrum& s) {
  if (s.lambda < 1.0) {
    if (s.merged.size() < 2) throw std::invalid_argument("lowest_excitation: need two levels");
    return s.merged[1].energy - s.merged[0].energy;
  }
  if (s.even_values.size() < 2) throw std::invalid_argument("lowest_excitation: need two levels");
  return s.even_values[1] - s.even_values[0];
}

} // namespace lipkin
