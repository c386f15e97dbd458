#pragma once

// One-sided least-squares fits of the logarithmic singularity model
//
//   y(x) = u^2 (a_1 L + a_2 L^2 + a_3 L^3),   u = x - x_c,  L = ln|u|
//
// to y = eps + 1 next to the critical line. Left and right of x_c are fitted
// independently; x_c itself is an input, not a fit parameter.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lipkin {

enum class Side { left, right };

inline std::string_view to_string(Side s) { return s == Side::left ? "left" : "right"; }

inline Side parse_side(std::string_view s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw std::invalid_argument("unknown side '" + std::string(s) + "'");
}

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
};

struct FitWindow {
  double near = 0.02; // |x - x_c| lower bound
  double far = 0.15;  // |x - x_c| upper bound
};

struct SingularityFit {
  double x_c = 0.0;
  Side side = Side::left;
  std::vector<double> coefficients; // a_1 .. a_p
  double quadratic = 0.0;           // a_0 u^2, only with FitOptions::quadratic_term
  double rms_residual = 0.0;
  double window_min = 0.0;
  double window_max = 0.0;
  std::size_t n_points = 0;
};

struct FitOptions {
  bool quadratic_term = false; // diagnostic a_0 u^2 column
};

/// Points on one side of x_c with near <= |x - x_c| <= far, dropping anything
/// closer than `exclusion` (one grid step of the discrete spectrum).
inline std::vector<FitPoint> window_points(std::span<const FitPoint> pts, double x_c, Side side,
                                           const FitWindow& w = {}, double exclusion = 0.0) {
  std::vector<FitPoint> out;
  const double lo = std::max(w.near, exclusion);
  for (const auto& p : pts) {
    const double u = p.x - x_c;
    if ((side == Side::left) != (u < 0)) continue;
    const double a = std::abs(u);
    if (u != 0.0 && a >= lo && a <= w.far) out.push_back(p);
  }
  return out;
}

namespace detail {

// Least squares min |A c - y| by Householder QR on column-normalised A
// (m x p, column-major). Throws on rank deficiency.
inline std::vector<double> householder_lstsq(std::vector<double> a, std::size_t m, std::size_t p,
                                             std::vector<double> y) {
  std::vector<double> colscale(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a[j * m + i] * a[j * m + i];
    s = std::sqrt(s);
    if (s == 0.0) throw std::domain_error("singularity fit: basis column vanishes on the window");
    colscale[j] = s;
    for (std::size_t i = 0; i < m; ++i) a[j * m + i] /= s;
  }
  std::vector<double> rdiag(p);
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += a[k * m + i] * a[k * m + i];
    norm = std::sqrt(norm);
    const double alpha = a[k * m + k] > 0 ? -norm : norm;
    rdiag[k] = alpha;
    if (norm == 0.0) continue;
    // v = x - alpha e_1, stored in place
    a[k * m + k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) vnorm2 += a[k * m + i] * a[k * m + i];
    auto reflect = [&](double* col) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += a[k * m + i] * col[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) col[i] -= f * a[k * m + i];
    };
    for (std::size_t j = k + 1; j < p; ++j) reflect(&a[j * m]);
    reflect(y.data());
  }
  double rmax = 0.0;
  for (double r : rdiag) rmax = std::max(rmax, std::abs(r));
  for (double r : rdiag)
    if (!(std::abs(r) > 1e-12 * rmax)) throw std::domain_error("singularity fit: basis is collinear on the window");
  std::vector<double> c(p);
  for (std::size_t k = p; k-- > 0;) {
    double s = y[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a[j * m + k] * c[j];
    c[k] = s / rdiag[k];
  }
  for (std::size_t j = 0; j < p; ++j) c[j] /= colscale[j];
  return c;
}

inline double poly_log(const std::vector<double>& a, double l) {
  double s = 0.0, lp = l;
  for (double ai : a) {
    s += ai * lp;
    lp *= l;
  }
  return s;
}

inline double poly_log_d(const std::vector<double>& a, double l) {
  double s = 0.0, lp = 1.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    s += static_cast<double>(p + 1) * a[p] * lp;
    lp *= l;
  }
  return s;
}

inline double poly_log_dd(const std::vector<double>& a, double l) {
  double s = 0.0, lp = 1.0;
  for (std::size_t p = 1; p < a.size(); ++p) {
    s += static_cast<double>((p + 1) * p) * a[p] * lp;
    lp *= l;
  }
  return s;
}

inline double checked_offset(const SingularityFit& f, double x) {
  const double u = x - f.x_c;
  if (u == 0.0) throw std::domain_error("singularity fit: logarithm is singular at x = x_c");
  if ((f.side == Side::left) != (u < 0))
    throw std::domain_error("singularity fit: x lies on the other side of x_c");
  return u;
}

} // namespace detail

inline SingularityFit fit_singularity(std::span<const FitPoint> pts, double x_c, Side side, int n_terms,
                                      const FitOptions& opt = {}) {
  if (n_terms < 1 || n_terms > 3) throw std::invalid_argument("singularity fit: 1 to 3 terms");
  const std::size_t p = static_cast<std::size_t>(n_terms) + (opt.quadratic_term ? 1 : 0);
  const std::size_t m = pts.size();
  if (m < p) throw std::invalid_argument("singularity fit: fewer points than coefficients");

  SingularityFit fit;
  fit.x_c = x_c;
  fit.side = side;
  fit.n_points = m;
  fit.window_min = HUGE_VAL;
  fit.window_max = -HUGE_VAL;
  std::vector<double> a(m * p), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = pts[i].x - x_c;
    if (u == 0.0 || (side == Side::left) != (u < 0))
      throw std::invalid_argument("singularity fit: point at x = " + std::to_string(pts[i].x) +
                                  " is not strictly on the requested side");
    const double l = std::log(std::abs(u));
    double lp = l;
    for (std::size_t j = 0; j < static_cast<std::size_t>(n_terms); ++j, lp *= l) a[j * m + i] = u * u * lp;
    if (opt.quadratic_term) a[(p - 1) * m + i] = u * u;
    y[i] = pts[i].y;
    fit.window_min = std::min(fit.window_min, pts[i].x);
    fit.window_max = std::max(fit.window_max, pts[i].x);
  }
  const auto c = detail::householder_lstsq(a, m, p, y);
  fit.coefficients.assign(c.begin(), c.begin() + n_terms);
  if (opt.quadratic_term) fit.quadratic = c.back();

  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double model = 0.0;
    for (std::size_t j = 0; j < p; ++j) model += a[j * m + i] * c[j];
    ss += (model - y[i]) * (model - y[i]);
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(m));
  return fit;
}

inline SingularityFit fit_singularity(const std::vector<FitPoint>& pts, double x_c, Side side, int n_terms,
                                      const FitOptions& opt = {}) {
  return fit_singularity(std::span<const FitPoint>(pts), x_c, side, n_terms, opt);
}

inline double fit_eval(const SingularityFit& f, double x) {
  const double u = detail::checked_offset(f, x);
  const double l = std::log(std::abs(u));
  return u * u * (detail::poly_log(f.coefficients, l) + f.quadratic);
}

/// dy/dx = 2u S(L) + u S'(L)
inline double fit_derivative(const SingularityFit& f, double x) {
  const double u = detail::checked_offset(f, x);
  const double l = std::log(std::abs(u));
  return 2.0 * u * (detail::poly_log(f.coefficients, l) + f.quadratic) + u * detail::poly_log_d(f.coefficients, l);
}

/// d2y/dx2 = 2S + 3S' + S''; the 2 a_1 L term diverges at x_c.
inline double fit_second_derivative(const SingularityFit& f, double x) {
  const double u = detail::checked_offset(f, x);
  const double l = std::log(std::abs(u));
  return 2.0 * (detail::poly_log(f.coefficients, l) + f.quadratic) + 3.0 * detail::poly_log_d(f.coefficients, l) +
         detail::poly_log_dd(f.coefficients, l);
}

} // namespace lipkin
