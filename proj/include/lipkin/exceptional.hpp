#pragma once

// Exceptional points of H(lambda) in the complex lambda-plane: values where
// two eigenvalues of a parity block coalesce, i.e. simultaneous roots of
//
//   det(B(lambda) - E) = 0   and   d/dE det(B(lambda) - E) = 0.
//
// An unreduced tridiagonal matrix has geometric multiplicity one for every
// eigenvalue, so any double root with lambda != 0 is defective.

#include "lipkin/eigen/charpoly.hpp"
#include "lipkin/eigen/complex_tridiag.hpp"
#include "lipkin/eigen/real_tridiag.hpp"
#include "lipkin/errors.hpp"
#include "lipkin/spin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace lipkin {

struct LevelPair {
  int k = 0;      // 1-based, ascending within the sector at real lambda
  int k_next = 0;

  friend bool operator==(const LevelPair&, const LevelPair&) = default;
};

struct ExceptionalPoint {
  cplx lambda_star{};
  cplx energy_star{};
  std::optional<LevelPair> pair;
  Parity sector = Parity::even;
  int n_particles = 0;
  double residual = 0.0; // size of one further Newton step, relative
  int iterations = 0;
};

/// Newton converged onto the real lambda axis, where no coalescence exists.
class SpuriousSolution : public std::runtime_error {
public:
  explicit SpuriousSolution(const std::string& what) : std::runtime_error(what) {}
};

struct RefineOptions {
  int max_iterations = 300;
  double step_tolerance = 1e-13;
  double max_residual = 1e-8;
};

namespace detail {

struct NewtonStep {
  cplx d_energy{};
  cplx d_lambda{};
  double relative = 0.0;
};

inline NewtonStep ep_newton_step(std::span<const double> diag, std::span<const double> unit, cplx lambda,
                                 cplx energy) {
  auto j = charpoly_jet(diag, unit, lambda, energy);
  normalise(j);
  // J [dE, dl]^T = -[D, D_E]^T with J = [[D_E, D_l], [D_EE, D_El]]
  const cplx det = j.d_e * j.d_el - j.d_l * j.d_ee;
  if (det == cplx{} || !std::isfinite(std::abs(det)))
    throw ConvergenceError("exceptional point: singular Newton system");
  NewtonStep s;
  s.d_energy = (-j.d * j.d_el + j.d_l * j.d_e) / det;
  s.d_lambda = (-j.d_e * j.d_e + j.d_ee * j.d) / det;
  s.relative = std::max(std::abs(s.d_energy) / std::max(1.0, std::abs(energy)),
                        std::abs(s.d_lambda) / std::max(1.0, std::abs(lambda)));
  return s;
}

} // namespace detail

namespace detail {

// A sector symmetric under m -> -m with odd dimension always holds E = 0,
// det(B - E) = E P(E^2). A pair +-e merging into that level is a triple
// point where the two-variable Jacobian is singular; there the condition
// reduces to P(0) = d/dE det(B - E)|_{E=0} = 0, a one-variable problem.
inline bool has_zero_level(std::span<const double> diag) {
  return diag.size() % 2 == 1 && diag.front() == -diag.back();
}

struct TripleRoot {
  cplx lambda{};
  double residual = HUGE_VAL;
  int iterations = 0;
};

inline std::optional<TripleRoot> triple_root_at_zero(std::span<const double> diag, std::span<const double> unit,
                                                     cplx lambda, const RefineOptions& opt) {
  TripleRoot t;
  for (; t.iterations < opt.max_iterations; ++t.iterations) {
    auto j = charpoly_jet(diag, unit, lambda, cplx{});
    normalise(j);
    if (j.d_el == cplx{}) return std::nullopt;
    cplx step = -j.d_e / j.d_el;
    const double cap = 0.5 * std::max(1.0, std::abs(lambda));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    lambda += step;
    if (!std::isfinite(std::abs(lambda))) return std::nullopt;
    if (std::abs(step) <= opt.step_tolerance * std::max(1.0, std::abs(lambda))) {
      ++t.iterations;
      break;
    }
  }
  auto j = charpoly_jet(diag, unit, lambda, cplx{});
  normalise(j);
  t.lambda = lambda;
  t.residual = j.d_el == cplx{} ? HUGE_VAL : std::abs(j.d_e / j.d_el) / std::max(1.0, std::abs(lambda));
  if (!(t.residual <= opt.max_residual)) return std::nullopt;
  return t;
}

} // namespace detail

/// Two-variable Newton iteration for (E*, lambda*), folded to Im lambda* >= 0.
inline ExceptionalPoint ep_refine(int n_particles, Parity sector, cplx lambda_seed, cplx energy_seed,
                                  const RefineOptions& opt = {}) {
  if (!std::isfinite(std::abs(lambda_seed)) || !std::isfinite(std::abs(energy_seed)))
    throw std::invalid_argument("ep_refine: seeds must be finite");
  const auto basis = sector_basis(n_particles, sector);
  if (basis.size() < 2) throw std::invalid_argument("ep_refine: sector has fewer than two levels");
  const auto unit = unit_couplings(n_particles, sector);
  const bool zero_level = detail::has_zero_level(basis);

  cplx lambda = lambda_seed, energy = energy_seed;
  bool converged = false;
  int it = 0;
  try {
    for (; it < opt.max_iterations; ++it) {
      auto s = detail::ep_newton_step(basis, unit, lambda, energy);
      // keep early steps from jumping across the plane
      const double cap = 0.5 * std::max(1.0, std::abs(lambda));
      if (std::abs(s.d_lambda) > cap) {
        const double f = cap / std::abs(s.d_lambda);
        s.d_lambda *= f;
        s.d_energy *= f;
      }
      energy += s.d_energy;
      lambda += s.d_lambda;
      if (!std::isfinite(std::abs(lambda)) || !std::isfinite(std::abs(energy)))
        throw ConvergenceError("ep_refine: iteration diverged");
      if (s.relative <= opt.step_tolerance) {
        converged = true;
        ++it;
        break;
      }
      // linear crawl towards a triple point: hand over to the reduced problem
      if (zero_level && it >= 30 && std::abs(energy) <= 1e-3 * std::max(1.0, std::abs(lambda))) break;
    }
  } catch (const ConvergenceError&) {
    if (!zero_level) throw;
  }

  ExceptionalPoint ep;
  ep.n_particles = n_particles;
  ep.sector = sector;
  ep.iterations = it;

  const bool near_zero = std::abs(energy) <= 1e-3 * std::max(1.0, std::abs(lambda));
  if (zero_level && (!converged || near_zero)) {
    if (auto t = detail::triple_root_at_zero(basis, unit, lambda, opt)) {
      lambda = t->lambda;
      energy = cplx{};
      ep.iterations += t->iterations;
      ep.residual = t->residual;
      converged = true;
    }
  }
  if (energy != cplx{}) {
    try {
      ep.residual = detail::ep_newton_step(basis, unit, lambda, energy).relative;
    } catch (const ConvergenceError&) {
      ep.residual = HUGE_VAL;
    }
  }
  if (!converged && !(ep.residual <= opt.max_residual))
    throw ConvergenceError("ep_refine: no convergence after " + std::to_string(opt.max_iterations) + " iterations");
  if (!(ep.residual <= opt.max_residual))
    throw ConvergenceError("ep_refine: residual " + std::to_string(ep.residual) + " above tolerance");
  if (std::abs(lambda.imag()) <= 1e-8 * std::max(1.0, std::abs(lambda)))
    throw SpuriousSolution("ep_refine: converged to real lambda " + std::to_string(lambda.real()) +
                           " where levels cannot coalesce");
  if (lambda.imag() < 0) {
    lambda = std::conj(lambda);
    energy = std::conj(energy);
  }
  // the set is symmetric under lambda -> -conj(lambda): snap rounding noise onto the axis
  if (std::abs(lambda.real()) <= 1e-12 * std::abs(lambda)) lambda.real(0.0);
  ep.lambda_star = lambda;
  ep.energy_star = energy;
  return ep;
}

struct Region {
  double re_min = 0.0, re_max = 3.0;
  double im_min = 0.0, im_max = 3.0;

  bool contains(cplx z, double tol = 1e-9) const {
    return z.real() >= re_min - tol && z.real() <= re_max + tol && z.imag() >= im_min - tol &&
           z.imag() <= im_max + tol;
  }
};

struct ScanGrid {
  int n_re = 0;
  int n_im = 0;
};

/// Cell spacing no coarser than half the expected near-axis EP spacing ~8/N.
inline ScanGrid default_grid(int n_particles, const Region& r) {
  const double h = std::min(0.05, 4.0 / std::max(1, n_particles));
  return {std::max(4, static_cast<int>(std::ceil((r.re_max - r.re_min) / h))),
          std::max(4, static_cast<int>(std::ceil((r.im_max - r.im_min) / h)))};
}

struct ScanOptions {
  /// Seed only pairs whose separation is below this multiple of the mean
  /// nearest-neighbour separation at the grid point; <= 0 seeds every pair.
  double seed_gap_ratio = 0.0;
  double dedup_distance = 1e-6;
  unsigned threads = 0; // 0: hardware concurrency
  RefineOptions refine{};
};

namespace detail {

inline bool ep_order(const ExceptionalPoint& a, const ExceptionalPoint& b) {
  if (a.lambda_star.real() != b.lambda_star.real()) return a.lambda_star.real() < b.lambda_star.real();
  if (a.lambda_star.imag() != b.lambda_star.imag()) return a.lambda_star.imag() < b.lambda_star.imag();
  return complex_less(a.energy_star, b.energy_star);
}

// Candidates within `radius` in lambda collapse onto one point; the one with
// the lowest Re E is kept (for even N each lambda hosts both E and -E).
inline std::vector<ExceptionalPoint> deduplicate(std::vector<ExceptionalPoint> c, double radius) {
  std::sort(c.begin(), c.end(), ep_order);
  std::vector<ExceptionalPoint> out;
  for (auto& ep : c) {
    auto hit = std::find_if(out.begin(), out.end(), [&](const ExceptionalPoint& o) {
      return std::abs(o.lambda_star - ep.lambda_star) < radius;
    });
    if (hit == out.end())
      out.push_back(std::move(ep));
    else if (ep.energy_star.real() < hit->energy_star.real())
      *hit = std::move(ep);
  }
  std::sort(out.begin(), out.end(), ep_order);
  return out;
}

inline std::vector<ExceptionalPoint> scan_row(int n_particles, Parity sector, const Region& region,
                                              const ScanGrid& grid, int row, const ScanOptions& opt) {
  std::vector<ExceptionalPoint> found;
  const double h_re = (region.re_max - region.re_min) / grid.n_re;
  const double h_im = (region.im_max - region.im_min) / grid.n_im;
  const double im = region.im_min + (row + 0.5) * h_im;
  for (int i = 0; i < grid.n_re; ++i) {
    const cplx lambda{region.re_min + (i + 0.5) * h_re, im};
    ComplexEigenResult ev;
    try {
      ev = eig_complex_tridiag(build_block(n_particles, lambda, sector));
    } catch (const ConvergenceError&) {
      continue;
    }
    const auto& v = ev.values;
    const std::size_t n = v.size();
    std::vector<std::size_t> nearest(n);
    std::vector<double> dist(n, HUGE_VAL);
    double mean = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const double d = std::abs(v[a] - v[b]);
        if (d < dist[a]) {
          dist[a] = d;
          nearest[a] = b;
        }
      }
      mean += dist[a];
    }
    mean /= static_cast<double>(n);
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a) {
      if (opt.seed_gap_ratio > 0 && dist[a] > opt.seed_gap_ratio * mean) continue;
      pairs.emplace(std::min(a, nearest[a]), std::max(a, nearest[a]));
    }
    for (const auto& [a, b] : pairs) {
      try {
        auto ep = ep_refine(n_particles, sector, lambda, 0.5 * (v[a] + v[b]), opt.refine);
        if (region.contains(ep.lambda_star)) found.push_back(std::move(ep));
      } catch (const std::runtime_error&) {
        // diverged or spurious seed
      }
    }
  }
  return found;
}

} // namespace detail

/// Exceptional points of one sector inside a rectangle of the closed upper
/// half-plane, ordered by (Re lambda, Im lambda). Grid cells are seeded at
/// their centres, so the real axis itself is never a seed.
inline std::vector<ExceptionalPoint> ep_scan(int n_particles, Parity sector, const Region& region,
                                             std::optional<ScanGrid> grid = std::nullopt,
                                             const ScanOptions& opt = {}) {
  if (region.im_min < 0.0) throw std::invalid_argument("ep_scan: region must lie in the upper half-plane");
  if (!(region.re_max >= region.re_min) || !(region.im_max >= region.im_min))
    throw std::invalid_argument("ep_scan: empty region");
  // H is Hermitian on the real axis: no coalescence there
  if (region.im_max == 0.0) return {};
  if (region.re_max == region.re_min) throw std::invalid_argument("ep_scan: region has zero width");
  if (sector_basis(n_particles, sector).size() < 2) return {};
  const ScanGrid g = grid.value_or(default_grid(n_particles, region));
  if (g.n_re < 1 || g.n_im < 1) throw std::invalid_argument("ep_scan: grid must have at least one cell");

  std::vector<std::vector<ExceptionalPoint>> rows(static_cast<std::size_t>(g.n_im));
  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(g.n_im));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int r = static_cast<int>(w); r < g.n_im; r += static_cast<int>(workers))
          rows[static_cast<std::size_t>(r)] = detail::scan_row(n_particles, sector, region, g, r, opt);
      });
  }
  std::vector<ExceptionalPoint> all;
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  return detail::deduplicate(std::move(all), opt.dedup_distance);
}

struct PairTrackOptions {
  int min_steps = 40;
  int max_bisections = 12;
  double ambiguity_ratio = 0.5; // continuation must be this much closer than any rival
};

namespace detail {

inline std::vector<cplx> eigenvalues_at(int n_particles, Parity sector, cplx lambda) {
  return eig_complex_tridiag(build_block(n_particles, lambda, sector)).values;
}

// Follows two eigenvalues from lambda a to lambda b by nearest matching,
// bisecting the step while the match is ambiguous.
inline void track_pair(int n, Parity sector, cplx a, cplx b, std::array<cplx, 2>& tracked, int depth,
                       const PairTrackOptions& opt) {
  const auto ev = eigenvalues_at(n, sector, b);
  std::array<std::size_t, 2> pick{};
  bool ok = ev.size() >= 2;
  for (int t = 0; t < 2 && ok; ++t) {
    double d1 = HUGE_VAL, d2 = HUGE_VAL;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const double d = std::abs(ev[i] - tracked[static_cast<std::size_t>(t)]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        pick[static_cast<std::size_t>(t)] = i;
      } else if (d < d2) {
        d2 = d;
      }
    }
    ok = d1 <= opt.ambiguity_ratio * d2;
  }
  ok = ok && pick[0] != pick[1];
  if (ok) {
    tracked = {ev[pick[0]], ev[pick[1]]};
    return;
  }
  if (depth >= opt.max_bisections)
    throw ConvergenceError("ep_pair_id: ambiguous continuation near lambda = (" + std::to_string(b.real()) + ", " +
                           std::to_string(b.imag()) + ")");
  const cplx mid = 0.5 * (a + b);
  track_pair(n, sector, a, mid, tracked, depth + 1, opt);
  track_pair(n, sector, mid, b, tracked, depth + 1, opt);
}

} // namespace detail

/// Identifies the coalescing levels by continuing both from lambda* straight
/// down to the real axis and matching them against the sorted real spectrum.
/// The distance from lambda* doubles per step, starting at 2^-min_steps Im lambda*.
inline LevelPair ep_pair_id(const ExceptionalPoint& ep, const PairTrackOptions& opt = {}) {
  const int n = ep.n_particles;
  const double x = ep.lambda_star.real();
  const double y = ep.lambda_star.imag();
  const int steps = std::max(1, opt.min_steps);
  auto at = [&](int s) { return cplx{x, y - y * std::ldexp(1.0, s - steps)}; };

  const auto start = detail::eigenvalues_at(n, ep.sector, at(0));
  if (start.size() < 2) throw std::invalid_argument("ep_pair_id: sector has fewer than two levels");
  std::vector<std::size_t> idx(start.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](auto a, auto b) {
    return std::abs(start[a] - ep.energy_star) < std::abs(start[b] - ep.energy_star);
  });
  std::array<cplx, 2> tracked{start[idx[0]], start[idx[1]]};

  for (int s = 1; s <= steps; ++s) detail::track_pair(n, ep.sector, at(s - 1), at(s), tracked, 0, opt);

  const auto real = eig_real_tridiag(build_block(n, x, ep.sector)).values;
  std::array<int, 2> k{};
  for (int t = 0; t < 2; ++t) {
    const double e = tracked[static_cast<std::size_t>(t)].real();
    std::size_t best = 0;
    for (std::size_t i = 1; i < real.size(); ++i)
      if (std::abs(real[i] - e) < std::abs(real[best] - e)) best = i;
    k[static_cast<std::size_t>(t)] = static_cast<int>(best) + 1;
  }
  if (k[0] > k[1]) std::swap(k[0], k[1]);
  if (k[1] != k[0] + 1)
    throw ConvergenceError("ep_pair_id: tracked levels " + std::to_string(k[0]) + " and " + std::to_string(k[1]) +
                           " are not adjacent");
  return {k[0], k[1]};
}

/// EPs of both sectors with 1 < Re lambda* < lambda_max and Im lambda* < im_tol.
/// Conjugate partners count once (only Im >= 0 is ever reported).
inline int near_real_ep_count(int n_particles, double lambda_max, double im_tol,
                              std::optional<ScanGrid> grid = std::nullopt, const ScanOptions& opt = {}) {
  if (!(lambda_max > 1.0)) throw std::invalid_argument("near_real_ep_count: lambda_max must exceed 1");
  if (!(im_tol > 0.0)) throw std::invalid_argument("near_real_ep_count: im_tol must be positive");
  const Region strip{1.0, lambda_max, 0.0, im_tol};
  int count = 0;
  for (Parity p : {Parity::even, Parity::odd}) {
    for (const auto& ep : ep_scan(n_particles, p, strip, grid, opt)) {
      const auto l = ep.lambda_star;
      if (l.real() > 1.0 && l.real() < lambda_max && l.imag() < im_tol) ++count;
    }
  }
  return count;
}

} // namespace lipkin
