#pragma once

#include <string>
#include <vector>

#include "glidetime/lattice.hpp"
#include "glidetime/spectral.hpp"

namespace gt {

enum class Topology { nontrivial, trivial, gapless };
enum class Region { I, I_prime, II, II_prime, III, III_prime, hermitian };
enum class DynamicClass { hermitian, A, A_prime, B, B_prime, C, C_prime };
enum class Frequencies { dual, single, all_real };

const char* to_string(Topology t);
const char* to_string(Region r);
const char* to_string(DynamicClass c);
const char* to_string(Frequencies f);

struct EigenmodePhaseLabel {
  Topology topology = Topology::trivial;
  Direction nhse = Direction::none;
  Region region = Region::hermitian;
  double zak_total = 0.0;  ///< NaN when gapless
  double line_gap = 0.0;
  /// Winding of the Re E < 0 and Re E > 0 loops: about the loop centroid, or
  /// the first real energy on that side with nonzero winding when the
  /// centroid lies outside its loop.
  int winding_neg = 0;
  int winding_pos = 0;
};

EigenmodePhaseLabel eigenmode_phase(const ModelParams& params, int k_count = 256);

struct DynamicPhaseLabel {
  DynamicClass cls = DynamicClass::hermitian;
  Frequencies freq = Frequencies::all_real;
  Direction direction = Direction::none;
  double max_im = 0.0;
  double spectral_radius = 0.0;
  std::vector<double> dominant_re;  ///< cluster centres of the dominant Re E
};

/// Requires n_cells >= 40. Throws ClassificationAmbiguous for three or more
/// dominant clusters.
DynamicPhaseLabel dynamic_phase(const ModelParams& params, int n_cells);
DynamicPhaseLabel dynamic_phase(const ModelParams& params, const CVector& obc_eigenvalues);

enum class DiagramKind { eigenmode, dynamic };

struct PhaseCell {
  double t3 = 0.0;
  double t4 = 0.0;
  std::string label;      ///< region tag or dynamic class; empty on error
  std::string topology;   ///< eigenmode diagrams
  Direction direction = Direction::none;
  std::string freq;       ///< dynamic diagrams
  std::string error;
};

struct BoundarySegment {
  double t3a, t4a, t3b, t4b;  ///< dual edge between two differing cells
  std::string from, to;
};

struct PhaseGrid {
  DiagramKind kind = DiagramKind::eigenmode;
  std::vector<double> t3_values;
  std::vector<double> t4_values;
  std::vector<PhaseCell> cells;  ///< index = i4 * |t3| + i3
  std::vector<BoundarySegment> boundaries;

  const PhaseCell& at(int i3, int i4) const { return cells[i4 * t3_values.size() + i3]; }
};

struct Range {
  double lo = 0.2;
  double hi = 8.0;
};

struct DiagramOptions {
  int k_count = 128;  ///< eigenmode diagrams
  /// Worker threads; 0 reads GT_WORKERS (default 1).
  int workers = 0;
  /// Label used for boundary extraction: full label or topology only.
  bool topology_boundaries = false;
};

/// Requires resolution >= 16.
PhaseGrid phase_diagram(DiagramKind kind, Range t3_range, Range t4_range, int resolution,
                        const ModelParams& base, const DiagramOptions& options = {});

/// Location of the Re line-gap closing between t_lo (gapped) and t_hi along an
/// axis-parallel cut; `vary_t3` selects the axis.
double gap_closing_bisection(const ModelParams& base, bool vary_t3, double fixed, double t_lo,
                             double t_hi, double tol = 1e-6);

enum class LyapunovPath { path1, path2 };
const char* to_string(LyapunovPath p);

struct PathSample {
  double m = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double lambda = 0.0;
  double growth_fit = 0.0;
  std::string dynamic_class;
  std::string error;
};

struct PathScanOptions {
  int n_cells = 40;
  double m_max = 8.0;
  double fit_time = 2000.0;
  bool fit_growth = true;
};

/// path1: t3 = 2 + m, t4 = 2; path2: t3 = 10, t4 = 2 + m; m in [0, m_max].
/// Requires samples >= 16.
std::vector<PathSample> lyapunov_path_scan(LyapunovPath path, int samples,
                                           const PathScanOptions& options = {});

/// |lambda[i+1] - 2 lambda[i] + lambda[i-1]| (zero at the ends).
std::vector<double> second_differences(const std::vector<PathSample>& samples);

}  // namespace gt
