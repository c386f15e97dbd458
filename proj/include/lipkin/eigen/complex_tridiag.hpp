#pragma once

#include "lipkin/eigen/real_tridiag.hpp"
#include "lipkin/errors.hpp"
#include "lipkin/spin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace lipkin {

using ComplexEigenResult = EigenResult<cplx, cplx>;

/// Lexicographic order used for every complex eigenvalue list.
inline bool complex_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

namespace detail {

inline double norm1(const cplx& z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Unitary Givens rotation G = [[c, s], [-conj(s), c]] with G * (p, q)^T = (r, 0)^T.
struct Givens {
  double c = 1.0;
  cplx s{0.0, 0.0};

  static Givens make(const cplx& p, const cplx& q) {
    Givens g;
    if (q == cplx{}) return g;
    if (p == cplx{}) {
      g.c = 0.0;
      g.s = std::conj(q) / std::abs(q);
      return g;
    }
    const double ap = std::abs(p);
    const double r = std::hypot(ap, std::abs(q));
    g.c = ap / r;
    g.s = (p / ap) * std::conj(q) / r;
    return g;
  }
};

// Dense row-major complex matrix, only what the Hessenberg QR needs.
class HessenbergMatrix {
public:
  explicit HessenbergMatrix(std::size_t n) : n_(n), a_(n * n) {}
  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::size_t size() const { return n_; }

  // rows i, i+1 <- G * rows, over columns [c0, c1]
  void rotate_rows(const Givens& g, std::size_t i, std::size_t c0, std::size_t c1) {
    for (std::size_t j = c0; j <= c1; ++j) {
      const cplx x = (*this)(i, j), y = (*this)(i + 1, j);
      (*this)(i, j) = g.c * x + g.s * y;
      (*this)(i + 1, j) = -std::conj(g.s) * x + g.c * y;
    }
  }
  // columns i, i+1 <- columns * G^H, over rows [r0, r1]
  void rotate_cols(const Givens& g, std::size_t i, std::size_t r0, std::size_t r1) {
    for (std::size_t k = r0; k <= r1; ++k) {
      const cplx x = (*this)(k, i), y = (*this)(k, i + 1);
      (*this)(k, i) = g.c * x + std::conj(g.s) * y;
      (*this)(k, i + 1) = -g.s * x + g.c * y;
    }
  }

private:
  std::size_t n_;
  std::vector<cplx> a_;
};

inline cplx wilkinson_shift(const HessenbergMatrix& h, std::size_t iu, int iter) {
  if (iter == 10 || iter == 30) {
    // exceptional shift to break cycles
    const double ex = std::abs(h(iu, iu - 1).real()) + (iu >= 2 ? std::abs(h(iu - 1, iu - 2).real()) : 0.0);
    return cplx{ex, 0.0} + h(iu, iu);
  }
  cplx t00 = h(iu - 1, iu - 1), t01 = h(iu - 1, iu), t10 = h(iu, iu - 1), t11 = h(iu, iu);
  const double scale = norm1(t00) + norm1(t01) + norm1(t10) + norm1(t11);
  if (scale == 0.0) return cplx{};
  t00 /= scale;
  t01 /= scale;
  t10 /= scale;
  t11 /= scale;
  const cplx b = t01 * t10;
  const cplx c = t00 - t11;
  const cplx disc = std::sqrt(c * c + 4.0 * b);
  const cplx det = t00 * t11 - b;
  const cplx trace = t00 + t11;
  cplx ev1 = 0.5 * (trace + disc);
  cplx ev2 = 0.5 * (trace - disc);
  // recover the smaller root from the product to avoid cancellation
  if (norm1(ev1) > norm1(ev2))
    ev2 = det / ev1;
  else if (ev2 != cplx{})
    ev1 = det / ev2;
  return scale * (norm1(ev1 - t11) < norm1(ev2 - t11) ? ev1 : ev2);
}

// Eigenvalues of an upper Hessenberg matrix by single-shift QR with
// deflation. Only the active window is updated since no Schur vectors are kept.
inline std::vector<cplx> hessenberg_qr_eigenvalues(HessenbergMatrix h, int max_iter_per_value = 30) {
  const std::size_t n = h.size();
  std::vector<cplx> out;
  if (n == 0) return out;
  const double eps = std::numeric_limits<double>::epsilon();
  double fro = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fro = std::max(fro, norm1(h(i, j)));
  const double floor = eps * eps * std::max(fro, std::numeric_limits<double>::min());

  auto negligible = [&](std::size_t i) {
    const double sub = norm1(h(i + 1, i));
    return sub <= eps * (norm1(h(i, i)) + norm1(h(i + 1, i + 1))) || sub <= floor;
  };

  std::size_t iu = n - 1;
  int iter = 0;
  long total = 0;
  const long budget = static_cast<long>(max_iter_per_value) * static_cast<long>(n);
  while (true) {
    while (iu > 0) {
      if (!negligible(iu - 1)) break;
      h(iu, iu - 1) = cplx{};
      --iu;
      iter = 0;
    }
    if (iu == 0) break;
    ++iter;
    if (++total > budget) throw ConvergenceError("complex Hessenberg QR: iteration budget exhausted");

    std::size_t il = iu - 1;
    while (il > 0 && !negligible(il - 1)) --il;

    const cplx shift = wilkinson_shift(h, iu, iter);
    Givens g = Givens::make(h(il, il) - shift, h(il + 1, il));
    h.rotate_rows(g, il, il, iu);
    h.rotate_cols(g, il, il, std::min(il + 2, iu));
    for (std::size_t i = il + 1; i < iu; ++i) {
      g = Givens::make(h(i, i - 1), h(i + 1, i - 1));
      h.rotate_rows(g, i, i - 1, iu);
      h(i + 1, i - 1) = cplx{};
      h.rotate_cols(g, i, il, std::min(i + 2, iu));
    }
  }
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(h(i, i));
  return out;
}

} // namespace detail

/// Eigenvalues of a complex-symmetric parity block, sorted by (real, imag).
/// Throws ConvergenceError when the QR budget runs out.
inline ComplexEigenResult eig_complex_tridiag(const TridiagonalBlock<cplx>& block) {
  ComplexEigenResult res;
  res.sector = block.sector;
  res.lambda = block.lambda;
  const std::size_t n = block.size();
  detail::HessenbergMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = block.diag[i];
    if (i + 1 < n) {
      h(i, i + 1) = block.offdiag[i];
      h(i + 1, i) = block.offdiag[i];
    }
  }
  res.values = detail::hessenberg_qr_eigenvalues(std::move(h));
  std::sort(res.values.begin(), res.values.end(), complex_less);
  return res;
}

inline ComplexEigenResult eig_complex_tridiag(const TridiagonalBlock<double>& block) {
  TridiagonalBlock<cplx> c;
  c.diag = block.diag;
  c.lambda = block.lambda;
  c.n_particles = block.n_particles;
  c.sector = block.sector;
  for (double o : block.offdiag) c.offdiag.emplace_back(o, 0.0);
  return eig_complex_tridiag(c);
}

} // namespace lipkin
