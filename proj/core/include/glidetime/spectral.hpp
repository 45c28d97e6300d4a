#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "glidetime/lattice.hpp"
#include "glidetime/types.hpp"

namespace gt {

/// Quad-precision copy of an extended solve.
struct ExtendedVectors;

/// Eigenvalues with paired right and left eigenvectors, <L_i|R_j> = delta_ij.
///
/// `right` holds the |R_i> as columns and `left` the bras <L_i| as rows, so
/// `left * right` is the identity and `left * psi` yields the expansion
/// coefficients of psi. Pairs are scaled so that ||L_i|| = ||R_i||; for
/// Hermitian input both are unit vectors.
struct BiorthogonalEigensystem {
  CVector eigenvalues;
  CMatrix right;
  CMatrix left;
  /// Smallest |<l_i|r_i>| over unit-normalized pairs before rescaling
  /// (reciprocal of the worst eigenvalue condition number, in the solve gauge).
  double condition_flag = 1.0;
  bool degeneracy_warning = false;
  /// Set by extended solves. Mode sums of strongly non-normal matrices cancel
  /// far below double resolution, so the helpers below run in quad when set.
  std::shared_ptr<const ExtendedVectors> extended;

  Eigen::Index size() const { return eigenvalues.size(); }
  bool has_extended() const { return extended != nullptr; }

  /// <L_j|psi> for every j.
  CVector project(const CVector& psi) const;
  /// sum_j c_j |R_j>.
  CVector expand(const CVector& coeffs) const;
  /// sum_j exp(-i (E_j + i gamma) t) |R_j><L_j|psi>; the factor exp(gamma t)
  /// is left out so that growing states stay representable.
  CVector propagate(const CVector& psi, double t, double gamma = 0.0) const;
  /// ||psi - sum_j |R_j><L_j|psi>|| / ||psi||.
  double completeness_residual(const CVector& psi) const;

  /// max_ij |<L_i|R_j> - delta_ij|
  double biorthogonality_error() const;
  /// ||sum_j E_j |R_j><L_j| - matrix||_F / ||matrix||_F
  double reconstruction_error(const CMatrix& matrix) const;
};

struct EigenOptions {
  Precision precision = Precision::standard;
  /// Optional positive diagonal similarity D: the solver works on D^-1 M D and
  /// maps the vectors back. Exponential gauges tame skin-effect non-normality.
  Eigen::VectorXd gauge;
  double degeneracy_threshold = 1e-10;
};

/// General complex input; runs in double regardless of `precision`.
BiorthogonalEigensystem biorthogonal_eigensystem(const CMatrix& matrix,
                                                 const EigenOptions& options = {});
/// Real input (real Schur form); honours `precision` and `gauge`.
BiorthogonalEigensystem biorthogonal_eigensystem(const RMatrix& matrix,
                                                 const EigenOptions& options = {});

/// Exponential gauge r^cell (per site) estimated from the non-Bloch root
/// structure so that the scaled OBC matrix has its GBZ centred on |beta| = 1.
Eigen::VectorXd skin_gauge(const ModelParams& params);
double skin_gauge_ratio(const ModelParams& params);

/// OBC eigensystem of `params` solved in the skin gauge.
BiorthogonalEigensystem obc_eigensystem(const ModelParams& params,
                                        Precision precision = Precision::standard);

// ---------------------------------------------------------------------------
// Bloch bands
// ---------------------------------------------------------------------------

struct BandStructure {
  std::vector<double> k;
  /// 4 x |k| energies, rows are continuity-sorted bands.
  CMatrix energies;
  /// Per k: columns are right eigenvectors in band order.
  std::vector<Matrix4c> right;
  /// Per k: rows are left eigenvectors (bras) in band order, left*right = 1.
  std::vector<Matrix4c> left;

  int band_count() const { return static_cast<int>(energies.rows()); }
};

/// Four continuity-sorted bands on the uniform grid of k_count points from
/// -pi to +pi inclusive. Requires k_count >= 8.
BandStructure pbc_bands(const ModelParams& params, int k_count);

/// Same sorting on an arbitrary increasing k list.
BandStructure bands_on_grid(const ModelParams& params, const std::vector<double>& k);

/// Eigenvalues of H(k) sorted by (Re, Im).
std::vector<Complex> sorted_bloch_energies(const ModelParams& params, double k);

// ---------------------------------------------------------------------------
// OBC analysis
// ---------------------------------------------------------------------------

enum class ModeKind { edge, skin, bulk };
const char* to_string(ModeKind kind);

struct ModeClassification {
  std::vector<ModeKind> kind;
  std::vector<double> center_of_mass;  ///< site units
  std::vector<double> ipr;
  std::vector<double> boundary_weight;  ///< weight in first + last unit cell
  double zero_mode_tolerance = 0.0;
  double skin_ipr_threshold = 0.0;
};

struct ObcAnalysis {
  BiorthogonalEigensystem eigensystem;
  ModeClassification classification;

  int count(ModeKind kind) const;
};

ModeClassification classify_modes(const ModelParams& params,
                                  const BiorthogonalEigensystem& eigensystem);

ObcAnalysis obc_analysis(const ModelParams& params, Precision precision = Precision::standard);

// ---------------------------------------------------------------------------
// Topological invariants
// ---------------------------------------------------------------------------

struct ZakPhase {
  /// Abelian biorthogonal Wilson loop per continuity band, wrapped to
  /// [-pi/2, 3pi/2). NaN when the band does not close onto itself across the
  /// zone boundary.
  std::vector<double> per_band;
  /// Two lower-Re(E) bands as a non-Abelian loop (determinant), same wrapping.
  /// NaN when gapless.
  double total_occupied = 0.0;
  bool gapless = false;
  /// min_k of Re(E_3) - Re(E_2) with bands sorted by real part.
  double line_gap = 0.0;
};

/// Requires k_count >= 64.
ZakPhase complex_zak_phase(const ModelParams& params, int k_count);

/// Minimum Re line gap between bands 2 and 3, refined between grid points.
double real_line_gap(const ModelParams& params, int k_count);
inline constexpr double kGaplessThreshold = 1e-6;

/// Energy winding number of the PBC spectrum around e_ref.
///
/// Reported in the orientation where a leftward skin effect carries W = -1:
/// W = -(1/2pi) * total phase of det(H(k) - e_ref) as k runs from -pi to pi.
/// The grid is doubled from k_count until the value is stable.
/// Throws InvalidArgument when e_ref touches the PBC spectrum and
/// NumericalFailure when refinement does not settle.
int energy_winding(const ModelParams& params, Complex e_ref, int k_count = 256);

/// Centroids of the PBC energies with Re E < 0 and Re E > 0 (two loops).
std::pair<Complex, Complex> pbc_loop_centroids(const ModelParams& params, int k_count = 512);

/// Distance from e_ref to the sampled PBC spectrum.
double distance_to_pbc_spectrum(const ModelParams& params, Complex e_ref, int k_count = 2048);

/// Splitting of the Kramers-like pairs at the given momenta (default +-pi).
///
/// The real parts pair up (sorted by Re: 1-2, 3-4) and, independently, the
/// imaginary parts pair up (sorted by Im: 1-2, 3-4). Returns the largest
/// splitting of either kind.
double kramers_gap(const ModelParams& params, std::vector<double> k_values = {kPi, -kPi});

}  // namespace gt
