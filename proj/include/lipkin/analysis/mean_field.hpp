#pragma once

#include <cmath>
#include <stdexcept>

namespace lipkin {

/// Mean-field excitation energy of the k-th quantum above the ground state:
/// k sqrt(1 - lambda^2) in the normal phase, k sqrt(2 (lambda^2 - 1)) in the
/// deformed phase. Both vanish at lambda = 1, where the value is undefined.
inline double mf_excitation(double lambda, int k) {
  if (k < 1) throw std::invalid_argument("mf_excitation: k must be positive");
  const double l = std::abs(lambda);
  if (l == 1.0) throw std::domain_error("mf_excitation: undefined at lambda = 1");
  if (l < 1.0) return k * std::sqrt(1.0 - l * l);
  return k * std::sqrt(2.0 * (l * l - 1.0));
}

/// Large-N ground state 2E_1/N in the deformed phase.
inline double mf_ground_scaled(double lambda) {
  if (lambda < 1.0) throw std::domain_error("mf_ground_scaled: only valid for lambda >= 1");
  return -0.5 * (lambda + 1.0 / lambda);
}

} // namespace lipkin
