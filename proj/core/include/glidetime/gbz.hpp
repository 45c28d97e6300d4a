#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glidetime/lattice.hpp"
#include "glidetime/polynomial.hpp"
#include "glidetime/spectral.hpp"

namespace gt {

/// Hopping range is one cell, so det(H(beta) - E) * beta^2 is a polynomial of
/// degree 4 in beta (and 4 in E).
inline constexpr int kClearingPower = 2;
inline constexpr int kBetaDegree = 2 * kClearingPower;

/// P(beta, E) = det(H(beta) - E) * beta^2, fitted once per model.
BivariatePolynomial characteristic_polynomial(const ModelParams& params);

struct BetaRoots {
  std::vector<Complex> roots;  ///< ascending |beta|
  bool degree_collapse = false;
};

BetaRoots characteristic_beta_roots(const BivariatePolynomial& poly, Complex energy);
BetaRoots characteristic_beta_roots(const ModelParams& params, Complex energy);

/// One member of an equal-modulus middle root pair. The raw pair of an OBC
/// eigenvalue is split by finite size; it is moved onto the exact locus
/// |beta_M| = |beta_{M+1}| by Newton on P(beta, E) = P(beta e^{i theta}, E) = 0
/// at the seed's relative phase theta.
struct GBZPoint {
  Complex beta;          ///< refined
  Complex raw_beta;      ///< root of P(., obc_energy)
  Complex energy;        ///< refined; shares beta with its pair partner
  Complex obc_energy;    ///< seed eigenvalue
  int source_mode = -1;  ///< index into the OBC eigenvalue list
  int branch = 0;        ///< 0: smaller of the raw middle pair, 1: larger
  double split = 0.0;    ///< |beta_{M+1}| / |beta_M| - 1 of the raw pair
  bool flagged = false;  ///< refinement failed, left the middle ranks, or degree collapse
};

struct SelfIntersection {
  Complex beta;
  std::vector<Complex> energies;  ///< energies whose GBZ passes through beta
};

struct GBZCurve {
  ModelParams params;
  std::vector<GBZPoint> points;  ///< ordered by arg(beta) in (-pi, pi]
  std::vector<SelfIntersection> self_intersections;
  std::vector<int> excluded_modes;  ///< edge (zero) modes, not on the GBZ
  double tolerance = 0.0;

  double max_modulus() const;
  double min_modulus() const;
  int flagged_count() const;
};

/// Relative equal-modulus tolerance for the raw middle root pair at this size.
/// Informational: raw pairs near spectral branch points exceed it.
double gbz_split_tolerance(int n_cells);

/// Number of raw pairs above gbz_split_tolerance.
int raw_split_count(const GBZCurve& curve);

/// Requires n_cells >= 20.
GBZCurve compute_gbz(const ModelParams& params, int n_cells,
                     Precision precision = Precision::standard);

/// Points where the GBZ crosses the negative real beta axis for two distinct
/// energies.
std::vector<SelfIntersection> negative_axis_intersections(const ModelParams& params,
                                                          double r_min, double r_max);

/// Throws UnsupportedBipolar for mixed magnitudes.
Direction nhse_direction(const GBZCurve& curve, double tol = 1e-4);

struct SaddlePoint {
  Complex k_s;     ///< beta = exp(i k_s)
  Complex beta;
  Complex energy;
  int band = -1;   ///< rank of `energy` among the eigenvalues of H(beta) by (Re, Im)
  bool on_gbz = false;  ///< the double root is the middle pair
  double residual = 0.0;  ///< |dE/dk| on re-evaluation
};

struct SaddleSearch {
  std::vector<SaddlePoint> points;
  int seeds = 0;
  int converged = 0;
  std::string diagnostic;  ///< non-empty when no seed converged
};

struct SaddleOptions {
  int re_k_count = 64;
  int im_k_count = 32;
  double im_k_bound = 3.0;
  double newton_tol = 1e-10;
  double merge_radius = 1e-6;
  int max_iterations = 60;
};

/// Solutions of P = dP/dbeta = 0 (double roots in beta, hence dE/dk = 0).
/// Band crossings, where E is also degenerate in H(beta), are excluded.
SaddleSearch saddle_points(const ModelParams& params, const SaddleOptions& options = {});

/// Largest Im E over saddle points lying on the GBZ.
double lyapunov_zero_drift(const ModelParams& params, const SaddleOptions& options = {});

enum class GreenMethod { contour, resolvent };

struct GreenOptions {
  GreenMethod method = GreenMethod::contour;
  double tol = 1e-12;     ///< quadrature convergence
  int max_nodes = 1 << 16;
  Precision precision = Precision::standard;
};

/// G_ij(omega) for sites i, j (zero-based, cell-major).
///
/// contour: the GBZ integral with the contour deformed to the circle
/// |beta| = sqrt(|beta_2(omega)| |beta_3(omega)|), which separates the same
/// roots as the GBZ; roots outside the GBZ annulus are checked against `curve`.
/// resolvent: entry (i, j) of (omega - H_OBC)^-1.
Complex green_element(const ModelParams& params, Complex omega, int i, int j, int n_cells,
                      const GreenOptions& options = {}, const GBZCurve* curve = nullptr);

/// Winding number of the closed polygon through the arg-ordered GBZ points
/// around `z`.
int gbz_winding_around(const GBZCurve& curve, Complex z);

}  // namespace gt
