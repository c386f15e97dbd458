#pragma once

// Characteristic determinant det(B - E) of a parity block through the
// three-term recurrence
//
//   D_0 = 1,  D_1 = d_1 - E,  D_i = (d_i - E) D_{i-1} - o_{i-1}^2 D_{i-2},
//
// carried together with its derivatives. Every quantity shares one power-of-2
// exponent, renormalised each step, so dimensions in the thousands neither
// overflow nor underflow. Note o^2, not |o|^2: the block is complex symmetric.

#include "lipkin/spin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>

namespace lipkin {

/// value = mantissa * 2^exponent, derivative = derivative_mantissa * 2^exponent.
struct DetValue {
  cplx mantissa{};
  long exponent = 0;
  cplx derivative_mantissa{};

  cplx value() const { return std::ldexp(1.0, static_cast<int>(exponent)) * mantissa; }
  cplx derivative() const { return std::ldexp(1.0, static_cast<int>(exponent)) * derivative_mantissa; }
  /// log2 |det|, -inf for an exact zero.
  double log2_abs() const {
    return mantissa == cplx{} ? -HUGE_VAL : std::log2(std::abs(mantissa)) + static_cast<double>(exponent);
  }
  double log2_abs_derivative() const {
    return derivative_mantissa == cplx{} ? -HUGE_VAL
                                         : std::log2(std::abs(derivative_mantissa)) + static_cast<double>(exponent);
  }
};

namespace detail {

inline double max_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max({m, std::abs(z.real()), std::abs(z.imag())});
  return m;
}

/// det(B(lambda) - E) and the partial derivatives the exceptional-point
/// Newton solver needs, with off-diagonal o_i = lambda * unit_i.
struct CharpolyJet {
  cplx d{}, d_e{}, d_ee{}, d_l{}, d_el{};
  long exponent = 0;
};

inline CharpolyJet charpoly_jet(std::span<const double> diag, std::span<const double> unit_couplings,
                                cplx lambda, cplx energy) {
  // index: 0 D, 1 D_E, 2 D_EE, 3 D_lambda, 4 D_E,lambda
  std::array<cplx, 5> prev{cplx{1.0}, {}, {}, {}, {}};
  std::array<cplx, 5> cur{};
  long exponent = 0;
  if (diag.empty()) return {cplx{1.0}, {}, {}, {}, {}, 0};
  cur = {diag[0] - energy, cplx{-1.0}, {}, {}, {}};

  const cplx lambda2 = lambda * lambda;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    const cplx a = diag[i] - energy;
    const double c2 = unit_couplings[i - 1] * unit_couplings[i - 1];
    const cplx o2 = lambda2 * c2;
    const cplx o2_l = 2.0 * lambda * c2;
    std::array<cplx, 5> next{
        a * cur[0] - o2 * prev[0],
        -cur[0] + a * cur[1] - o2 * prev[1],
        -2.0 * cur[1] + a * cur[2] - o2 * prev[2],
        a * cur[3] - o2 * prev[3] - o2_l * prev[0],
        -cur[3] + a * cur[4] - o2 * prev[4] - o2_l * prev[1],
    };
    prev = cur;
    cur = next;

    double big = std::max(max_norm(cur), max_norm(prev));
    if (big != 0.0 && (big > 0x1p100 || big < 0x1p-100)) {
      const int e = std::ilogb(big);
      for (auto& z : cur) z = std::ldexp(1.0, -e) * z;
      for (auto& z : prev) z = std::ldexp(1.0, -e) * z;
      exponent += e;
    }
  }
  return {cur[0], cur[1], cur[2], cur[3], cur[4], exponent};
}

/// Rescale so that |mantissa| lands in [0.5, 1); derivatives follow.
inline void normalise(CharpolyJet& j) {
  const double ref = j.d != cplx{} ? std::abs(j.d) : std::abs(j.d_e);
  if (ref == 0.0 || !std::isfinite(ref)) return;
  int e = 0;
  (void)std::frexp(ref, &e);
  const double f = std::ldexp(1.0, -e);
  j.d *= f;
  j.d_e *= f;
  j.d_ee *= f;
  j.d_l *= f;
  j.d_el *= f;
  j.exponent += e;
}

} // namespace detail

template <BlockScalar Scalar>
DetValue charpoly_det(const TridiagonalBlock<Scalar>& block, cplx energy) {
  const std::size_t n = block.size();
  std::array<cplx, 2> prev{cplx{1.0}, {}};
  std::array<cplx, 2> cur{};
  long exponent = 0;
  if (n == 0) return {cplx{1.0}, 0, {}};
  cur = {block.diag[0] - energy, cplx{-1.0}};
  for (std::size_t i = 1; i < n; ++i) {
    const cplx a = block.diag[i] - energy;
    const cplx o = block.offdiag[i - 1];
    const cplx o2 = o * o;
    std::array<cplx, 2> next{a * cur[0] - o2 * prev[0], -cur[0] + a * cur[1] - o2 * prev[1]};
    prev = cur;
    cur = next;
    const double big = std::max(detail::max_norm(cur), detail::max_norm(prev));
    if (big != 0.0 && (big > 0x1p100 || big < 0x1p-100)) {
      const int e = std::ilogb(big);
      for (auto& z : cur) z = std::ldexp(1.0, -e) * z;
      for (auto& z : prev) z = std::ldexp(1.0, -e) * z;
      exponent += e;
    }
  }
  detail::CharpolyJet j{cur[0], cur[1], {}, {}, {}, exponent};
  detail::normalise(j);
  return {j.d, j.exponent, j.d_e};
}

} // namespace lipkin
