#include "glidetime/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "glidetime/error.hpp"
#include "glidetime/gbz.hpp"

namespace gt {

namespace {

struct BlochSystem {
  Eigen::Vector4cd energies;
  Matrix4c right;
  Matrix4c left;
};

BlochSystem bloch_system(const ModelParams& params, double k) {
  const auto es = biorthogonal_eigensystem(CMatrix(build_bloch(params, k).entries));
  return {es.eigenvalues, es.right, es.left};
}

bool re_im_less(Complex a, Complex b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

void permute(BlochSystem& s, const std::array<int, 4>& order) {
  BlochSystem out = s;
  for (int b = 0; b < 4; ++b) {
    out.energies(b) = s.energies(order[b]);
    out.right.col(b) = s.right.col(order[b]);
    out.left.row(b) = s.left.row(order[b]);
  }
  s = out;
}

std::array<int, 4> order_by_re_im(const Eigen::Vector4cd& e) {
  std::array<int, 4> idx{0, 1, 2, 3};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return re_im_less(e(a), e(b)); });
  return idx;
}

double wrap_phase(double theta) {
  // [-pi/2, 3pi/2)
  double t = std::fmod(theta + 0.5 * kPi, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  return t - 0.5 * kPi;
}

std::vector<double> periodic_grid(int n) {
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = -kPi + 2.0 * kPi * i / n;
  return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gauge
// ---------------------------------------------------------------------------

double skin_gauge_ratio(const ModelParams& params) {
  params.validate();
  if (params.hermitian()) return 1.0;
  const auto poly = characteristic_polynomial(params);
  double rho = 1.0;
  constexpr int kSamples = 48;
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> logs;
    for (int i = 0; i < kSamples; ++i) {
      const Complex beta = std::polar(rho, -kPi + 2.0 * kPi * (i + 0.5) / kSamples);
      Eigen::ComplexEigenSolver<Matrix4c> es(build_non_bloch(params, beta).entries, false);
      for (int b = 0; b < 4; ++b) {
        const auto roots = characteristic_beta_roots(poly, es.eigenvalues()(b));
        if (roots.degree_collapse || roots.roots.size() != 4) continue;
        logs.push_back(0.5 * (std::log(std::abs(roots.roots[1])) + std::log(std::abs(roots.roots[2]))));
      }
    }
    if (logs.empty()) break;
    std::nth_element(logs.begin(), logs.begin() + logs.size() / 2, logs.end());
    rho = std::exp(logs[logs.size() / 2]);
  }
  return rho;
}

Eigen::VectorXd skin_gauge(const ModelParams& params) {
  const double r = skin_gauge_ratio(params);
  Eigen::VectorXd g(params.sites());
  const double centre = 0.5 * (params.n_cells - 1);
  for (int s = 0; s < params.sites(); ++s) g(s) = std::pow(r, cell_of(s) - centre);
  return g;
}

BiorthogonalEigensystem obc_eigensystem(const ModelParams& params, Precision precision) {
  params.validate();
  const auto h = build_real_space(params, Boundary::open);
  EigenOptions opts;
  opts.precision = precision;
  if (!params.hermitian()) opts.gauge = skin_gauge(params);
  return biorthogonal_eigensystem(h.entries, opts);
}

// ---------------------------------------------------------------------------
// Bands
// ---------------------------------------------------------------------------

BandStructure bands_on_grid(const ModelParams& params, const std::vector<double>& k) {
  params.validate();
  if (k.empty()) throw InvalidArgument("empty k grid");
  BandStructure out;
  out.k = k;
  out.energies.resize(4, static_cast<Eigen::Index>(k.size()));

  std::array<int, 4> perm{0, 1, 2, 3};
  std::vector<std::array<int, 4>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  BlochSystem prev;
  for (std::size_t i = 0; i < k.size(); ++i) {
    BlochSystem cur = bloch_system(params, k[i]);
    if (i == 0) {
      permute(cur, order_by_re_im(cur.energies));
    } else {
      Eigen::Matrix4d overlap;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          overlap(a, b) = std::abs(prev.right.col(a).dot(cur.right.col(b)));
      double best = -1.0;
      std::array<int, 4> choice{};
      for (const auto& p : perms) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) s += overlap(a, p[a]);
        if (s > best + 1e-12) {
          best = s;
          choice = p;
        }
      }
      permute(cur, choice);
    }
    out.energies.col(static_cast<Eigen::Index>(i)) = cur.energies;
    out.right.push_back(cur.right);
    out.left.push_back(cur.left);
    prev = cur;
  }
  return out;
}

BandStructure pbc_bands(const ModelParams& params, int k_count) {
  if (k_count < 8) throw InvalidArgument("k_count must be >= 8");
  std::vector<double> k(k_count);
  for (int i = 0; i < k_count; ++i) k[i] = -kPi + 2.0 * kPi * i / (k_count - 1);
  k.back() = kPi;
  return bands_on_grid(params, k);
}

std::vector<Complex> sorted_bloch_energies(const ModelParams& params, double k) {
  Eigen::ComplexEigenSolver<Matrix4c> es(build_bloch(params, k).entries, false);
  std::vector<Complex> e(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(e.begin(), e.end(), re_im_less);
  return e;
}

// ---------------------------------------------------------------------------
// OBC
// ---------------------------------------------------------------------------

const char* to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::edge: return "edge";
    case ModeKind::skin: return "skin";
    case ModeKind::bulk: return "bulk";
  }
  return "?";
}

int ObcAnalysis::count(ModeKind kind) const {
  return static_cast<int>(
      std::count(classification.kind.begin(), classification.kind.end(), kind));
}

namespace {

struct ModeShape {
  double com, ipr, boundary;
};

ModeShape mode_shape(const CMatrix& right, Eigen::Index j) {
  const Eigen::Index n = right.rows();
  const Eigen::VectorXd w = right.col(j).cwiseAbs2() / right.col(j).squaredNorm();
  ModeShape s{0.0, 0.0, 0.0};
  for (Eigen::Index x = 0; x < n; ++x) {
    s.com += double(x) * w(x);
    s.ipr += w(x) * w(x);
    if (x < kSitesPerCell || x >= n - kSitesPerCell) s.boundary += w(x);
  }
  return s;
}

}  // namespace

ModeClassification classify_modes(const ModelParams& params,
                                  const BiorthogonalEigensystem& es) {
  if (es.size() != params.sites()) throw InvalidArgument("eigensystem size does not match params");
  ModeClassification c;
  const double radius = es.eigenvalues.cwiseAbs().maxCoeff();
  c.zero_mode_tolerance = 1e-8 * radius;

  const double t_ref = std::sqrt(std::abs(params.t3 * params.t4));
  const ModelParams ref = params.with_couplings(t_ref, t_ref);
  const auto ref_es = params.hermitian() ? es : obc_eigensystem(ref);
  const double ref_tol = 1e-8 * ref_es.eigenvalues.cwiseAbs().maxCoeff();
  double max_bulk_ipr = 0.0;
  for (Eigen::Index j = 0; j < ref_es.size(); ++j) {
    const auto s = mode_shape(ref_es.right, j);
    const bool edge = std::abs(ref_es.eigenvalues(j)) < ref_tol && s.boundary > 0.5;
    if (!edge) max_bulk_ipr = std::max(max_bulk_ipr, s.ipr);
  }
  c.skin_ipr_threshold = 2.0 * max_bulk_ipr;

  for (Eigen::Index j = 0; j < es.size(); ++j) {
    const auto s = mode_shape(es.right, j);
    c.center_of_mass.push_back(s.com);
    c.ipr.push_back(s.ipr);
    c.boundary_weight.push_back(s.boundary);
    if (std::abs(es.eigenvalues(j)) < c.zero_mode_tolerance && s.boundary > 0.5)
      c.kind.push_back(ModeKind::edge);
    else if (s.ipr > c.skin_ipr_threshold)
      c.kind.push_back(ModeKind::skin);
    else
      c.kind.push_back(ModeKind::bulk);
  }
  return c;
}

ObcAnalysis obc_analysis(const ModelParams& params, Precision precision) {
  ObcAnalysis out;
  out.eigensystem = obc_eigensystem(params, precision);
  out.classification = classify_modes(params, out.eigensystem);
  return out;
}

// ---------------------------------------------------------------------------
// Zak phase
// ---------------------------------------------------------------------------

double real_line_gap(const ModelParams& params, int k_count) {
  auto gap_at = [&](double k) {
    const auto e = sorted_bloch_energies(params, k);
    return e[2].real() - e[1].real();
  };
  const auto grid = periodic_grid(k_count);
  std::size_t best = 0;
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    g[i] = gap_at(grid[i]);
    if (g[i] < g[best]) best = i;
  }
  // golden-section refinement on the bracketing interval
  const double h = 2.0 * kPi / k_count;
  double a = grid[best] - h, b = grid[best] + h;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = gap_at(c), fd = gap_at(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - phi * (b - a); fc = gap_at(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + phi * (b - a); fd = gap_at(d);
    }
  }
  return std::min({g[best], fc, fd});
}

ZakPhase complex_zak_phase(const ModelParams& params, int k_count) {
  params.validate();
  if (k_count < 64) throw InvalidArgument("k_count must be >= 64");
  ZakPhase out;
  out.line_gap = real_line_gap(params, k_count);
  out.gapless = out.line_gap < kGaplessThreshold;

  // occupied pair: the two lower-Re eigenstates at every k
  const auto grid = periodic_grid(k_count);
  std::vector<BlochSystem> sys;
  sys.reserve(grid.size());
  for (double k : grid) {
    BlochSystem s = bloch_system(params, k);
    permute(s, order_by_re_im(s.energies));
    sys.push_back(s);
  }
  if (out.gapless) {
    out.total_occupied = std::numeric_limits<double>::quiet_NaN();
  } else {
    double theta = 0.0;
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const auto& a = sys[i];
      const auto& b = sys[(i + 1) % sys.size()];
      const Eigen::Matrix2cd m = a.left.topRows<2>() * b.right.leftCols<2>();
      theta -= std::arg(m.determinant());
    }
    out.total_occupied = wrap_phase(theta);
  }

  // per continuity band, when the band returns to itself across the zone edge
  std::vector<double> kk = grid;
  kk.push_back(kPi);
  const auto bands = bands_on_grid(params, kk);
  const Eigen::Index last = bands.energies.cols() - 1;
  const double scale = 1.0 + bands.energies.cwiseAbs().maxCoeff();
  for (int b = 0; b < 4; ++b) {
    if (std::abs(bands.energies(b, last) - bands.energies(b, 0)) > 1e-8 * scale) {
      out.per_band.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    double theta = 0.0;
    for (Eigen::Index i = 0; i < last; ++i) {
      const auto& r_next = (i + 1 == last) ? bands.right[0] : bands.right[i + 1];
      const Complex o = bands.left[i].row(b).transpose().cwiseProduct(r_next.col(b)).sum();
      theta -= std::arg(o);
    }
    out.per_band.push_back(wrap_phase(theta));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Winding
// ---------------------------------------------------------------------------

double distance_to_pbc_spectrum(const ModelParams& params, Complex e_ref, int k_count) {
  double best = std::numeric_limits<double>::infinity();
  for (double k : periodic_grid(k_count))
    for (const auto& e : sorted_bloch_energies(params, k)) best = std::min(best, std::abs(e - e_ref));
  return best;
}

namespace {

double winding_sum(const ModelParams& params, Complex e_ref, int n) {
  const auto grid = periodic_grid(n);
  auto det_at = [&](double k) {
    return Matrix4c(build_bloch(params, k).entries - e_ref * Matrix4c::Identity()).determinant();
  };
  const Complex first = det_at(grid[0]);
  Complex prev = first;
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    const Complex cur = (i == n) ? first : det_at(grid[i]);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return -total / (2.0 * kPi);
}

}  // namespace

int energy_winding(const ModelParams& params, Complex e_ref, int k_count) {
  params.validate();
  if (k_count < 8) throw InvalidArgument("k_count must be >= 8");
  const auto scale = 1.0 + std::abs(params.t1) + std::abs(params.t2) +
                     std::max(std::abs(params.t3), std::abs(params.t4));
  if (distance_to_pbc_spectrum(params, e_ref) < 1e-6 * scale)
    throw InvalidArgument("reference energy lies on the PBC spectrum");
  // e_ref is on the spectrum exactly when P(., e_ref) has a unit-modulus root.
  for (const auto& beta : characteristic_beta_roots(params, e_ref).roots)
    if (std::abs(std::abs(beta) - 1.0) < 1e-7)
      throw InvalidArgument("reference energy lies on the PBC spectrum");

  double prev = winding_sum(params, e_ref, k_count);
  int n = k_count;
  for (int refine = 0; refine < 8; ++refine) {
    n *= 2;
    const double cur = winding_sum(params, e_ref, n);
    if (std::round(cur) == std::round(prev) && std::abs(cur - std::round(cur)) < 1e-3)
      return static_cast<int>(std::round(cur));
    prev = cur;
  }
  throw NumericalFailure("winding number did not settle under grid refinement");
}

std::pair<Complex, Complex> pbc_loop_centroids(const ModelParams& params, int k_count) {
  Complex neg = 0.0, pos = 0.0;
  int nn = 0, np = 0;
  for (double k : periodic_grid(k_count))
    for (const auto& e : sorted_bloch_energies(params, k)) {
      if (e.real() < 0) {
        neg += e;
        ++nn;
      } else {
        pos += e;
        ++np;
      }
    }
  return {nn ? neg / double(nn) : Complex(0), np ? pos / double(np) : Complex(0)};
}

double kramers_gap(const ModelParams& params, std::vector<double> k_values) {
  double gap = 0.0;
  for (double k : k_values) {
    auto e = sorted_bloch_energies(params, k);
    gap = std::max({gap, std::abs(e[0].real() - e[1].real()), std::abs(e[2].real() - e[3].real())});
    std::sort(e.begin(), e.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
    gap = std::max({gap, std::abs(e[0].imag() - e[1].imag()), std::abs(e[2].imag() - e[3].imag())});
  }
  return gap;
}

}  // namespace gt
