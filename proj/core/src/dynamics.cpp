#include "glidetime/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

#include "glidetime/error.hpp"

namespace gt {

namespace {

constexpr double kLogOverflow = 230.2585092994046;  // log(1e100)

void check_times(const std::vector<double>& times) {
  if (times.empty() || times.front() != 0.0) throw InvalidArgument("times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] >= times[i - 1])) throw InvalidArgument("times must be sorted");
}

// Stores `row` (true state exp(log_s) * row) into the grid under its policy.
void store(EvolutionGrid& g, int r, const CVector& row, double log_s) {
  const double n = row.norm();
  if (g.normalization == Normalization::per_instant) {
    g.psi.row(r) = (row / n).transpose();
    g.log_scale[r] = log_s + std::log(n);
    return;
  }
  if (log_s + std::log(n) < kLogOverflow) {
    g.psi.row(r) = (row * std::exp(log_s)).transpose();
    g.log_scale[r] = 0.0;
  } else {
    g.psi.row(r) = (row / n).transpose();
    g.log_scale[r] = log_s + std::log(n);
  }
}

EvolutionGrid make_grid(const ModelParams& params, const CVector& psi0,
                        const std::vector<double>& times, const EvolveOptions& options) {
  params.validate();
  check_times(times);
  if (psi0.size() != params.sites()) throw InvalidArgument("psi0 length does not match the lattice");
  if (psi0.norm() == 0.0) throw InvalidArgument("psi0 is zero");
  EvolutionGrid g;
  g.times = times;
  g.psi.resize(static_cast<Eigen::Index>(times.size()), psi0.size());
  g.log_scale.assign(times.size(), 0.0);
  g.normalization = options.normalization;
  g.method = options.method;
  g.n_cells = params.n_cells;
  Eigen::Index x0;
  psi0.cwiseAbs().maxCoeff(&x0);
  g.x0 = static_cast<int>(x0);
  return g;
}

void run_spectral(EvolutionGrid& g, const BiorthogonalEigensystem& es, const CVector& psi0) {
  const double gamma = es.eigenvalues.imag().maxCoeff();
  for (int r = 0; r < g.rows(); ++r) {
    const double t = g.times[r];
    if (t == 0.0) {
      store(g, r, psi0, 0.0);
      if (g.normalization == Normalization::raw) g.psi.row(r) = psi0.transpose();
      continue;
    }
    store(g, r, es.propagate(psi0, t, gamma), gamma * t);
  }
}

// exp(-i H h) psi by Taylor series; requires ||H|| h <= 0.5 or so
CVector taylor_step(const CMatrix& h_mat, double h, const CVector& psi) {
  CVector out = psi, term = psi;
  const double ref = psi.norm();
  for (int m = 1; m < 60; ++m) {
    term = (h_mat * term) * Complex(0.0, -h / m);
    out += term;
    if (term.norm() < 1e-18 * ref) break;
  }
  return out;
}

void run_stepped(EvolutionGrid& g, const ModelParams& params, const CVector& psi0, double step_norm) {
  const CMatrix h = build_real_space(params, Boundary::open).entries.cast<Complex>();
  const double hn = h.cwiseAbs().colwise().sum().maxCoeff();
  const double h0 = hn > 0 ? step_norm / hn : 1.0;
  const CMatrix u0 = (CMatrix(h * Complex(0.0, -h0))).exp();

  CVector psi = psi0;
  double log_s = 0.0;
  store(g, 0, psi0, 0.0);
  if (g.normalization == Normalization::raw) g.psi.row(0) = psi0.transpose();
  for (int r = 1; r < g.rows(); ++r) {
    double dt = g.times[r] - g.times[r - 1];
    auto steps = static_cast<long>(std::floor(dt / h0));
    for (long s = 0; s < steps; ++s) {
      psi = u0 * psi;
      const double n = psi.norm();
      if (n > 1e50 || n < 1e-50) {
        psi /= n;
        log_s += std::log(n);
      }
    }
    const double rem = dt - double(steps) * h0;
    if (rem > 0) psi = taylor_step(h, rem, psi);
    store(g, r, psi, log_s);
  }
}

}  // namespace

const char* to_string(Normalization n) { return n == Normalization::raw ? "raw" : "per_instant"; }
const char* to_string(Propagation p) { return p == Propagation::spectral ? "spectral" : "stepped"; }

CVector delta_state(int n_cells, std::optional<int> site) {
  if (n_cells < 2) throw InvalidArgument("n_cells must be >= 2");
  const int sites = kSitesPerCell * n_cells;
  const int x = site.value_or(2 * n_cells);
  if (x < 0 || x >= sites) throw InvalidArgument("delta site out of range");
  CVector v = CVector::Zero(sites);
  v(x) = 1.0;
  return v;
}

EvolutionGrid evolve(const ModelParams& params, const BiorthogonalEigensystem& eigensystem,
                     const CVector& psi0, const std::vector<double>& times,
                     const EvolveOptions& options) {
  EvolutionGrid g = make_grid(params, psi0, times, options);
  if (options.method == Propagation::spectral && !eigensystem.degeneracy_warning) {
    if (eigensystem.size() != psi0.size()) throw InvalidArgument("eigensystem size mismatch");
    run_spectral(g, eigensystem, psi0);
  } else {
    g.fell_back = options.method == Propagation::spectral;
    g.method = Propagation::stepped;
    run_stepped(g, params, psi0, options.step_norm);
  }
  return g;
}

EvolutionGrid evolve(const ModelParams& params, const CVector& psi0,
                     const std::vector<double>& times, const EvolveOptions& options) {
  if (options.method == Propagation::stepped) {
    EvolutionGrid g = make_grid(params, psi0, times, options);
    run_stepped(g, params, psi0, options.step_norm);
    return g;
  }
  return evolve(params, obc_eigensystem(params, options.precision), psi0, times, options);
}

EvolutionGrid normalized(const EvolutionGrid& grid) {
  EvolutionGrid g = grid;
  if (g.normalization == Normalization::per_instant) return g;
  for (int r = 0; r < g.rows(); ++r) {
    const double n = g.psi.row(r).norm();
    g.psi.row(r) /= n;
    g.log_scale[r] += std::log(n);
  }
  g.normalization = Normalization::per_instant;
  return g;
}

std::vector<double> uniform_times(double t_max, int count) {
  if (count < 2 || !(t_max > 0)) throw InvalidArgument("need count >= 2 and t_max > 0");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = t_max * i / (count - 1);
  t.back() = t_max;
  return t;
}

std::vector<double> log_times(double t_max, int count) {
  if (count < 3 || !(t_max > 0)) throw InvalidArgument("need count >= 3 and t_max > 0");
  std::vector<double> t(count, 0.0);
  const double lo = std::log(t_max * 1e-3), hi = std::log(t_max);
  for (int i = 1; i < count; ++i) t[i] = std::exp(lo + (hi - lo) * (i - 1) / (count - 2));
  t.back() = t_max;
  return t;
}

std::vector<double> log_norm_trace(const EvolutionGrid& grid) {
  if (grid.normalization != Normalization::raw)
    throw InvalidArgument("norm trace of a per-instant grid is trivially 1");
  std::vector<double> out(grid.rows());
  for (int r = 0; r < grid.rows(); ++r)
    out[r] = 2.0 * grid.log_scale[r] + std::log(grid.psi.row(r).squaredNorm());
  return out;
}

std::vector<double> norm_trace(const EvolutionGrid& grid) {
  auto out = log_norm_trace(grid);
  for (auto& v : out) v = std::exp(v);
  return out;
}

double amplification_identity_residual(const EvolutionGrid& grid,
                                       const BiorthogonalEigensystem& es) {
  if (es.size() != grid.sites()) throw InvalidArgument("eigensystem size does not match the grid");
  const auto lhs = log_norm_trace(grid);
  const CVector psi0 = grid.psi.row(0).transpose() * std::exp(grid.log_scale[0]);
  const double gamma = es.eigenvalues.imag().maxCoeff();
  double worst = 0.0;
  for (int r = 0; r < grid.rows(); ++r) {
    const double t = grid.times[r];
    // a^dag (R^dag R) a = ||R a||^2
    const double rhs = 2.0 * gamma * t + std::log(es.propagate(psi0, t, gamma).squaredNorm());
    worst = std::max(worst, std::abs(std::expm1(rhs - lhs[r])));
  }
  return worst;
}

std::vector<double> diagonal_amplification_log(const EvolutionGrid& grid,
                                               const BiorthogonalEigensystem& es) {
  if (es.size() != grid.sites()) throw InvalidArgument("eigensystem size does not match the grid");
  const CVector psi0 = grid.psi.row(0).transpose() * std::exp(grid.log_scale[0]);
  const CVector a = es.project(psi0);
  std::vector<double> out(grid.rows());
  for (int r = 0; r < grid.rows(); ++r) {
    const double t = grid.times[r];
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (a(j) == 0.0) continue;
      // coefficient of the unit-normalised right vector
      terms.push_back(2.0 * es.eigenvalues(j).imag() * t + std::log(std::norm(a(j))) +
                      std::log(es.right.col(j).squaredNorm()));
      mx = std::max(mx, terms.back());
    }
    double s = 0.0;
    for (double v : terms) s += std::exp(v - mx);
    out[r] = mx + std::log(s);
  }
  return out;
}

std::vector<double> com_trajectory(const EvolutionGrid& grid) {
  std::vector<double> out(grid.rows());
  for (int r = 0; r < grid.rows(); ++r) {
    const Eigen::VectorXd w = grid.psi.row(r).cwiseAbs2().transpose();
    double m = 0.0;
    for (Eigen::Index x = 0; x < w.size(); ++x) m += double(x) * w(x);
    out[r] = m / w.sum();
  }
  return out;
}

BoundaryWeight boundary_weight(const EvolutionGrid& grid, double fraction) {
  if (!(fraction > 0.0 && fraction < 0.5)) throw InvalidArgument("fraction must be in (0, 0.5)");
  const int s = grid.sites();
  const int m = std::max(1, static_cast<int>(std::floor(fraction * s)));
  BoundaryWeight out;
  for (int r = 0; r < grid.rows(); ++r) {
    const Eigen::VectorXd w = grid.psi.row(r).cwiseAbs2().transpose();
    const double total = w.sum();
    out.left.push_back(w.head(m).sum() / total);
    out.right.push_back(w.tail(m).sum() / total);
  }
  return out;
}

double max_group_speed(const ModelParams& params, int k_count) {
  // Hellmann-Feynman: dE/dk = <L| dH/dk |R>
  double vmax = 0.0;
  for (int i = 0; i < k_count; ++i) {
    const double k = -kPi + 2.0 * kPi * (i + 0.5) / k_count;
    Matrix4c dh = Matrix4c::Zero();
    const Complex em = std::exp(Complex(0.0, -k)), ep = std::exp(Complex(0.0, k));
    dh(0, 2) = -kI * params.t1 * em;
    dh(2, 0) = kI * params.t1 * ep;
    dh(1, 3) = -kI * params.t2 * em;
    dh(3, 1) = kI * params.t2 * ep;
    const auto es = biorthogonal_eigensystem(CMatrix(build_bloch(params, k).entries));
    const CMatrix v = es.left * dh * es.right;
    for (int b = 0; b < 4; ++b) vmax = std::max(vmax, std::abs(v(b, b).real()));
  }
  return vmax;
}

double transit_estimate(const ModelParams& params) { return params.n_cells / max_group_speed(params); }

double default_horizon(const ModelParams& params) { return 3.0 * transit_estimate(params); }

double beating_amplitude(const EvolutionGrid& grid, double t_from) {
  std::vector<int> rows;
  for (int r = 0; r < grid.rows(); ++r)
    if (grid.times[r] >= t_from) rows.push_back(r);
  if (rows.size() < 4) throw InvalidArgument("need at least 4 rows at or after t_from");
  const auto m = static_cast<Eigen::Index>(rows.size());
  const double t0 = grid.times[rows.front()], span = grid.times[rows.back()] - t0;
  RMatrix basis(m, 3);
  RMatrix w(m, grid.sites());
  for (Eigen::Index i = 0; i < m; ++i) {
    const int r = rows[i];
    const double u = span > 0 ? (grid.times[r] - t0) / span : 0.0;
    basis.row(i) << 1.0, u, u * u;
    w.row(i) = grid.psi.row(r).cwiseAbs2() / grid.psi.row(r).squaredNorm();
  }
  // slow relaxation is not beating: remove a quadratic trend per site
  const RMatrix resid = w - basis * basis.colPivHouseholderQr().solve(w);
  return (resid.colwise().maxCoeff() - resid.colwise().minCoeff()).maxCoeff();
}

GrowthFit growth_rate_fit(const ModelParams& params, double t_max, double dt) {
  params.validate();
  if (!(t_max > 0 && dt > 0)) throw InvalidArgument("need t_max > 0 and dt > 0");
  const CMatrix h = build_real_space(params, Boundary::open).entries.cast<Complex>();
  const CMatrix u = (CMatrix(h * Complex(0.0, -dt))).exp();
  CVector psi = delta_state(params.n_cells);
  const auto steps = static_cast<long>(std::ceil(t_max / dt));
  double acc = 0.0;
  std::vector<double> ts, ls;
  for (long s = 1; s <= steps; ++s) {
    psi = u * psi;
    const double n = psi.norm();
    acc += std::log(n);
    psi /= n;
    const double t = s * dt;
    if (t >= 0.5 * t_max) {
      ts.push_back(t);
      ls.push_back(acc);
    }
  }
  const double n = double(ts.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sl += ls[i];
    stt += ts[i] * ts[i];
    stl += ts[i] * ls[i];
  }
  GrowthFit fit;
  fit.rate = (n * stl - st * sl) / (n * stt - st * st);
  fit.intercept = (sl - fit.rate * st) / n;
  double ss = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double d = ls[i] - fit.intercept - fit.rate * ts[i];
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace gt
