#pragma once

#include "lipkin/analysis/spectrum.hpp"
#include "lipkin/eigen/real_tridiag.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace lipkin {

/// Inverse participation ratio sum |v_i|^4 of a normalised vector.
inline double ipr(std::span<const double> v) {
  double norm2 = 0.0, p = 0.0;
  for (double x : v) {
    const double x2 = x * x;
    norm2 += x2;
    p += x2 * x2;
  }
  if (v.empty() || std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
    throw std::invalid_argument("ipr: vector is not normalised");
  return p;
}

inline double ipr(const std::vector<double>& v) { return ipr(std::span<const double>(v)); }

struct LocalizationRow {
  int k = 0;
  double x = 0.0;
  double energy = 0.0;
  double eps = 0.0;
  double ipr = 0.0;
  double dominant_m = 0.0;      // basis state carrying the largest weight
  double dominant_weight = 0.0;
};

/// IPR of every eigenvector of one sector block.
inline std::vector<LocalizationRow> localization(int n_particles, double lambda, Parity p) {
  const auto block = build_block(n_particles, lambda, p);
  const auto r = eig_real_tridiag(block, true);
  std::vector<LocalizationRow> rows;
  rows.reserve(r.values.size());
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    const auto& v = r.vectors[k];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    const int kk = static_cast<int>(k) + 1;
    rows.push_back({kk, sector_x(n_particles, p, kk), r.values[k], 2.0 * r.values[k] / n_particles, ipr(v),
                    block.sector.m(arg), v[arg] * v[arg]});
  }
  return rows;
}

} // namespace lipkin
