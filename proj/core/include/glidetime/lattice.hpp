#pragma once

#include "glidetime/types.hpp"

namespace gt {

/// Couplings of the glide-time symmetric double SSH chain.
///
/// t1, t2 are the reciprocal intra-chain hoppings; t3, t4 the non-reciprocal
/// inter-chain ones (a->b carries t3, b->a carries t4; reversed on c/d).
/// Hermitian exactly when t3 == t4.
struct ModelParams {
  double t1 = 1.0;
  double t2 = 2.0;
  double t3 = 2.0;
  double t4 = 2.0;
  int n_cells = 40;

  /// Throws InvalidArgument on non-finite couplings or n_cells < 2.
  void validate() const;

  bool hermitian() const { return t3 == t4; }
  int sites() const { return kSitesPerCell * n_cells; }

  /// Same chain with t3 and t4 exchanged (mirror image across the Hermitian line).
  ModelParams mirrored() const;
  ModelParams with_couplings(double t3_new, double t4_new) const;
  ModelParams with_cells(int n) const;

  bool operator==(const ModelParams&) const = default;
};

enum class Boundary { open, periodic };

/// 4x4 Bloch / non-Bloch Hamiltonian. `momentum` is the complex q with
/// beta = exp(i q); for build_bloch it is real.
struct MomentumMatrix {
  Matrix4c entries;
  Complex momentum;
  Complex beta() const { return std::exp(kI * momentum); }
};

/// Dense real-space Hamiltonian, cell-major site order (a1, b1, c1, d1, a2, ...).
struct RealSpaceMatrix {
  RMatrix entries;
  Boundary boundary;
  int n_cells;
};

/// Site index of sublattice `s` in unit cell `cell` (both zero-based).
constexpr int site_index(int cell, Sublattice s) {
  return kSitesPerCell * cell + static_cast<int>(s);
}
constexpr int cell_of(int site) { return site / kSitesPerCell; }

// Plane waves are psi_n = beta^n (n = cell index). The hop a_{n+1}^dag c_n
// therefore enters the a-row / c-column as t1 / beta, i.e. t1 e^{-ik}.

MomentumMatrix build_bloch(const ModelParams& params, double k);

/// Throws InvalidArgument when beta == 0.
MomentumMatrix build_non_bloch(const ModelParams& params, Complex beta);

RealSpaceMatrix build_real_space(const ModelParams& params, Boundary boundary);

/// Glide operator G(k) = e^{ik/2}(cos(k/2) s1 t1 + sin(k/2) s2 t1), with the
/// first Pauli factor acting on the chain index {ab | cd} and the second on
/// the position inside the pair.
Matrix4c glide_operator(Complex k);

struct SymmetryResiduals {
  double glide = 0.0;     ///< max |G H(k) G^-1 - H(k)|
  double trs = 0.0;       ///< max |conj(H(k)) - H(-k)|
  double theta_sq = 0.0;  ///< max over eigenvectors of |theta^2 psi - e^{ik} psi|
  Complex theta_sq_factor;  ///< <psi|theta^2|psi> for the lowest band
};

SymmetryResiduals symmetry_residuals(const ModelParams& params, double k);

}  // namespace gt
