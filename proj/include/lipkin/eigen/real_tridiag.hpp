#pragma once

#include "lipkin/errors.hpp"
#include "lipkin/spin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lipkin {

template <class Value, class Lambda>
struct EigenResult {
  std::vector<Value> values;
  /// vectors[k] is the eigenvector belonging to values[k]; empty unless requested.
  std::vector<std::vector<double>> vectors;
  ParitySector sector;
  Lambda lambda{};

  bool has_vectors() const { return !vectors.empty(); }
};

using RealEigenResult = EigenResult<double, double>;

namespace detail {

// Implicit-shift QL on a symmetric tridiagonal matrix (tql1/tql2 lineage).
// d: diagonal, in/out (eigenvalues, unsorted). e: subdiagonal with e[i]
// coupling i and i+1; destroyed. z: row-major n x n accumulator or nullptr.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>* z,
                           int max_sweeps_per_value = 60) {
  const std::size_t n = d.size();
  if (n < 2) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) + dd == dd) break;
      }
      if (m == l) break;
      if (++iter > max_sweeps_per_value)
        throw ConvergenceError("tridiagonal QL: no convergence for eigenvalue " + std::to_string(l));

      // Wilkinson-style shift from the leading 2x2
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z) {
          auto& zz = *z;
          for (std::size_t k = 0; k < n; ++k) {
            f = zz[k * n + i + 1];
            zz[k * n + i + 1] = s * zz[k * n + i] + c * f;
            zz[k * n + i] = c * zz[k * n + i] - s * f;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

} // namespace detail

/// All eigenvalues (ascending) of a real parity block, optionally with
/// orthonormal eigenvectors. O(dim^2) without vectors, O(dim^3) with.
inline RealEigenResult eig_real_tridiag(const TridiagonalBlock<double>& block, bool want_vectors = false) {
  RealEigenResult res;
  res.sector = block.sector;
  res.lambda = block.lambda;

  const std::size_t n = block.size();
  std::vector<double> d = block.diag;
  std::vector<double> e(block.offdiag.begin(), block.offdiag.end());
  std::vector<double> z;
  if (want_vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  }
  detail::tridiagonal_ql(d, e, want_vectors ? &z : nullptr);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });

  res.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) res.values[k] = d[order[k]];
  if (want_vectors) {
    res.vectors.assign(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) res.vectors[k][i] = z[i * n + order[k]];
  }
  return res;
}

/// Complex-lambda overload restricted to the real axis.
inline RealEigenResult eig_real_tridiag(const TridiagonalBlock<cplx>& block, bool want_vectors = false) {
  if (block.lambda.imag() != 0.0)
    throw std::invalid_argument("eig_real_tridiag needs a real coupling; use eig_complex_tridiag");
  TridiagonalBlock<double> real;
  real.diag = block.diag;
  real.lambda = block.lambda.real();
  real.n_particles = block.n_particles;
  real.sector = block.sector;
  for (const auto& o : block.offdiag) real.offdiag.push_back(o.real());
  return eig_real_tridiag(real, want_vectors);
}

} // namespace lipkin
