#pragma once

#include <vector>

#include "glidetime/dynamics.hpp"
#include "glidetime/gbz.hpp"
#include "glidetime/spectral.hpp"

namespace gt {

enum class WeightAxis { obc_mode, gbz_beta, bz_k };
const char* to_string(WeightAxis axis);

struct WeightCoordinate {
  int mode = -1;     ///< obc_mode: eigenvalue index
  Complex beta;      ///< gbz_beta
  Complex energy;    ///< matched energy (obc_mode, gbz_beta) or band energy (bz_k)
  double k = 0.0;    ///< bz_k
  int band = -1;     ///< bz_k: band; gbz_beta: source GBZ point index
  int branch = -1;   ///< gbz_beta: 0 for the lower Re E of the pair
  bool flagged = false;
};

/// weights(t, c); a row is in the grid's scale (see EvolutionGrid::log_scale).
struct WeightField {
  WeightAxis axis = WeightAxis::obc_mode;
  std::vector<WeightCoordinate> coordinates;
  std::vector<double> times;
  CMatrix weights;
  bool normalized_per_instant = false;

  int columns() const { return static_cast<int>(coordinates.size()); }
};

/// Rows scaled to unit Euclidean norm over unflagged coordinates; flagged
/// columns are zeroed.
WeightField normalized(const WeightField& field);

/// D_j(t) = <L_j|psi(t)>.
WeightField obc_mode_weights(const EvolutionGrid& grid, const BiorthogonalEigensystem& eigensystem);

/// max_t ||sum_j D_j(t) R_j - psi(t)|| / ||psi(t)||.
double reconstruction_residual(const WeightField& field, const EvolutionGrid& grid,
                               const BiorthogonalEigensystem& eigensystem);

/// Psi(beta) = sum_n seq(n) beta^{-(n - origin)} for a scalar sequence
/// (n = 0, 1, ...). Throws InvalidArgument on beta == 0.
std::vector<Complex> z_transform(const CVector& sequence, const std::vector<Complex>& betas,
                                 int origin);

/// Lattice version: per sublattice, with x_n the cell coordinate and the origin
/// the cell of `origin_site` (default: middle site). Returns 4 x |betas|.
CMatrix z_transform_lattice(const CVector& state, const std::vector<Complex>& betas,
                            int origin_site = -1);

/// Non-Bloch weights G(t, beta) = <phi_L(beta)|Psi(t, beta)> for the two
/// eigenpairs of H(beta) with energies +-E of the point. Two columns per GBZ
/// point (branch 0: lower Re E); flagged when matching fails.
WeightField nonbloch_weights(const EvolutionGrid& grid, const GBZCurve& curve,
                             int origin_site = -1);

/// |K|: projection of the Fourier component psi(t, k) onto the biorthogonal
/// Bloch eigenvectors of `bands`, jointly normalized over (k, band) per row.
/// Columns are ordered band-major.
WeightField bz_fourier_weights(const EvolutionGrid& grid, const BandStructure& bands);

/// d Re E / dk per band (rows) and k (columns): central differences inside,
/// one-sided at the ends.
RMatrix group_velocity(const BandStructure& bands);

}  // namespace gt
