#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glidetime/lattice.hpp"
#include "glidetime/spectral.hpp"

namespace gt {

enum class Normalization { raw, per_instant };
enum class Propagation { spectral, stepped };
const char* to_string(Normalization n);
const char* to_string(Propagation p);

/// Wavefunction samples over (time x site).
///
/// Raw rows that would exceed 1e100 are stored rescaled: the true state is
/// exp(log_scale[r]) * psi.row(r).
struct EvolutionGrid {
  std::vector<double> times;
  CMatrix psi;
  std::vector<double> log_scale;
  Normalization normalization = Normalization::raw;
  Propagation method = Propagation::spectral;
  bool fell_back = false;  ///< spectral requested, stepped used
  int x0 = -1;
  int n_cells = 0;

  int rows() const { return static_cast<int>(times.size()); }
  int sites() const { return static_cast<int>(psi.cols()); }
};

/// Unit amplitude at `site` (default 2 * n_cells, the middle).
CVector delta_state(int n_cells, std::optional<int> site = std::nullopt);

struct EvolveOptions {
  Propagation method = Propagation::spectral;
  Normalization normalization = Normalization::raw;
  Precision precision = Precision::standard;
  /// Substep bound ||H||_1 * dt for the stepped method.
  double step_norm = 0.5;
};

EvolutionGrid evolve(const ModelParams& params, const CVector& psi0,
                     const std::vector<double>& times, const EvolveOptions& options = {});

/// Same, reusing a precomputed OBC eigensystem for the spectral method.
EvolutionGrid evolve(const ModelParams& params, const BiorthogonalEigensystem& eigensystem,
                     const CVector& psi0, const std::vector<double>& times,
                     const EvolveOptions& options = {});

/// Copy with every row scaled to unit norm.
EvolutionGrid normalized(const EvolutionGrid& grid);

std::vector<double> uniform_times(double t_max, int count);
/// 0 followed by count-1 log-spaced points ending at t_max (first at t_max * 1e-3).
std::vector<double> log_times(double t_max, int count);

/// <psi(t)|psi(t)>; raw grids only. Overflows to inf for rescaled rows; use
/// log_norm_trace there.
std::vector<double> norm_trace(const EvolutionGrid& grid);
/// log <psi(t)|psi(t)>; raw grids only.
std::vector<double> log_norm_trace(const EvolutionGrid& grid);

/// max_t |<psi|psi> - a^dag (R^dag R) a| / <psi|psi>, a_j = e^{-i E_j t} <L_j|psi(0)>.
double amplification_identity_residual(const EvolutionGrid& grid,
                                       const BiorthogonalEigensystem& eigensystem);

/// Diagonal-only right-hand side sum_j e^{2 Im E_j t} |<L_j|psi(0)>|^2 (unit R_j),
/// as log values per time row. Differs from the norm whenever modes overlap.
std::vector<double> diagonal_amplification_log(const EvolutionGrid& grid,
                                               const BiorthogonalEigensystem& eigensystem);

std::vector<double> com_trajectory(const EvolutionGrid& grid);

struct BoundaryWeight {
  std::vector<double> left;
  std::vector<double> right;
};
/// Weight of |psi|^2 (fraction of the row total) in the leftmost and
/// rightmost `fraction` of sites. Requires 0 < fraction < 0.5.
BoundaryWeight boundary_weight(const EvolutionGrid& grid, double fraction);

/// max_k |d Re E / dk| over the four Bloch bands, in cells per unit time.
double max_group_speed(const ModelParams& params, int k_count = 1024);
/// n_cells / max_group_speed.
double transit_estimate(const ModelParams& params);
/// 3 * transit_estimate.
double default_horizon(const ModelParams& params);

/// Largest peak-to-peak swing of per-instant |psi_x|^2 about its quadratic
/// least-squares trend over the rows with t >= t_from, maximised over sites.
double beating_amplitude(const EvolutionGrid& grid, double t_from);

struct GrowthFit {
  double rate = 0.0;       ///< d/dt log |psi|, fitted on [t_max/2, t_max]
  double intercept = 0.0;
  double rms = 0.0;
};
/// Renormalised stepped propagation from the middle delta with the log norm
/// accumulated per step.
GrowthFit growth_rate_fit(const ModelParams& params, double t_max = 2000.0, double dt = 0.5);

}  // namespace gt
