#pragma once

// SU(2) representation data and the parity blocks of the Lipkin Hamiltonian
//
//   H(lambda) = J_z + lambda / (2N) (J_+^2 + J_-^2)
//
// in the J_z eigenbasis |j, m>, j = N/2. J_+^2 only connects m to m+2, so H
// splits into two tridiagonal blocks: m in {-j, -j+2, ...} and
// m in {-j+1, -j+3, ...}. Only these blocks are ever stored.

#include "lipkin/errors.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace lipkin {

using cplx = std::complex<double>;

/// Neutral sector label: `even` is the class with j + m even (it contains
/// m = -j), `odd` the class with j + m odd. Independent of the parity of N.
enum class Parity { even, odd };

inline std::string_view to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

inline Parity parse_parity(std::string_view s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw std::invalid_argument("unknown parity '" + std::string(s) + "'");
}

/// The conventional physics label: the sector containing m = -j is named
/// after the parity of N, the other one gets the opposite name.
inline Parity physical_label(int n_particles, Parity p) {
  const bool n_even = n_particles % 2 == 0;
  const bool contains_bottom = p == Parity::even;
  return (contains_bottom == n_even) ? Parity::even : Parity::odd;
}

class SpinRepresentation {
public:
  explicit SpinRepresentation(int n_particles) : n_(n_particles) {
    if (n_particles < 1)
      throw std::invalid_argument("particle number must be >= 1 (the interaction scales as 1/N)");
  }

  int n_particles() const { return n_; }
  int twice_j() const { return n_; }
  double spin_j() const { return 0.5 * n_; }
  int dimension() const { return n_ + 1; }

private:
  int n_;
};

/// One parity class of m-values, ascending in steps of 2. m is stored as 2m
/// so half-integer spins stay exact.
struct ParitySector {
  Parity parity = Parity::even;
  std::vector<int> twice_m;

  std::size_t size() const { return twice_m.size(); }
  double m(std::size_t i) const { return 0.5 * twice_m[i]; }
};

inline ParitySector make_sector(int n_particles, Parity p) {
  SpinRepresentation rep(n_particles);
  ParitySector s;
  s.parity = p;
  for (int tm = -rep.twice_j() + (p == Parity::even ? 0 : 2); tm <= rep.twice_j(); tm += 4)
    s.twice_m.push_back(tm);
  return s;
}

inline std::vector<double> sector_basis(int n_particles, Parity p) {
  const auto s = make_sector(n_particles, p);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s.m(i);
  return out;
}

/// Matrix elements <j, m+2| J_+^2 |j, m> / (2N) along a sector, i.e. the
/// off-diagonal at lambda = 1. Computed as the product of two single-step
/// ladder factors sqrt((j-m)(j+m+1)) so nothing overflows for large N.
inline std::vector<double> unit_couplings(int n_particles, Parity p) {
  const auto s = make_sector(n_particles, p);
  const double scale = 1.0 / (2.0 * n_particles);
  std::vector<double> c;
  if (s.size() < 2) return c;
  c.reserve(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    // j - m and j + m + 1 are integers for every m in the representation
    const std::int64_t a = (n_particles - s.twice_m[i]) / 2;
    const std::int64_t b = (n_particles + s.twice_m[i]) / 2 + 1;
    const double step1 = std::sqrt(static_cast<double>(a * b));
    const double step2 = std::sqrt(static_cast<double>((a - 1) * (b + 1)));
    c.push_back(scale * step1 * step2);
  }
  return c;
}

template <class Scalar>
concept BlockScalar = std::is_same_v<Scalar, double> || std::is_same_v<Scalar, cplx>;

/// One parity block of H(lambda). Symmetric, not Hermitian: for complex
/// lambda the block is complex symmetric.
template <BlockScalar Scalar>
struct TridiagonalBlock {
  std::vector<double> diag;
  std::vector<Scalar> offdiag;
  Scalar lambda{};
  int n_particles = 0;
  ParitySector sector;

  std::size_t size() const { return diag.size(); }
};

template <BlockScalar Scalar>
TridiagonalBlock<Scalar> build_block(int n_particles, Scalar lambda, Parity p) {
  TridiagonalBlock<Scalar> b;
  b.sector = make_sector(n_particles, p);
  b.n_particles = n_particles;
  b.lambda = lambda;
  b.diag.resize(b.sector.size());
  for (std::size_t i = 0; i < b.sector.size(); ++i) b.diag[i] = b.sector.m(i);
  const auto unit = unit_couplings(n_particles, p);
  b.offdiag.reserve(unit.size());
  for (double c : unit) b.offdiag.push_back(lambda * c);
  return b;
}

/// (2/N) H v on one sector, the tridiagonal action without forming H.
template <BlockScalar Scalar, class V>
auto apply_scaled_hamiltonian(const TridiagonalBlock<Scalar>& block, std::span<const V> v) {
  using Out = std::common_type_t<Scalar, V>;
  const std::size_t n = block.size();
  if (v.size() != n)
    throw std::invalid_argument("vector length " + std::to_string(v.size()) +
                                " does not match block dimension " + std::to_string(n));
  const double scale = 2.0 / block.n_particles;
  std::vector<Out> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Out acc = Out(block.diag[i]) * Out(v[i]);
    if (i > 0) acc += Out(block.offdiag[i - 1]) * Out(v[i - 1]);
    if (i + 1 < n) acc += Out(block.offdiag[i]) * Out(v[i + 1]);
    out[i] = Out(scale) * acc;
  }
  return out;
}

template <BlockScalar Scalar, class V>
auto apply_scaled_hamiltonian(const TridiagonalBlock<Scalar>& block, const std::vector<V>& v) {
  return apply_scaled_hamiltonian(block, std::span<const V>(v));
}

} // namespace lipkin
