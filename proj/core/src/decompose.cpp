#include "glidetime/decompose.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "glidetime/error.hpp"

namespace gt {

const char* to_string(WeightAxis axis) {
  switch (axis) {
    case WeightAxis::obc_mode: return "obc_mode";
    case WeightAxis::gbz_beta: return "gbz_beta";
    case WeightAxis::bz_k: return "bz_k";
  }
  return "?";
}

WeightField normalized(const WeightField& field) {
  WeightField out = field;
  for (int c = 0; c < out.columns(); ++c)
    if (out.coordinates[c].flagged) out.weights.col(c).setZero();
  for (Eigen::Index r = 0; r < out.weights.rows(); ++r) {
    const double n = out.weights.row(r).norm();
    if (n > 0) out.weights.row(r) /= n;
  }
  out.normalized_per_instant = true;
  return out;
}

WeightField obc_mode_weights(const EvolutionGrid& grid, const BiorthogonalEigensystem& es) {
  if (es.size() != grid.sites()) throw InvalidArgument("eigensystem size does not match the grid");
  WeightField f;
  f.axis = WeightAxis::obc_mode;
  f.times = grid.times;
  f.normalized_per_instant = false;
  f.weights.resize(grid.rows(), es.size());
  for (int r = 0; r < grid.rows(); ++r)
    f.weights.row(r) = es.project(grid.psi.row(r).transpose()).transpose();
  for (Eigen::Index j = 0; j < es.size(); ++j) {
    WeightCoordinate c;
    c.mode = static_cast<int>(j);
    c.energy = es.eigenvalues(j);
    f.coordinates.push_back(c);
  }
  return f;
}

double reconstruction_residual(const WeightField& field, const EvolutionGrid& grid,
                               const BiorthogonalEigensystem& es) {
  if (field.axis != WeightAxis::obc_mode || field.weights.rows() != grid.rows())
    throw InvalidArgument("field does not belong to the grid");
  double worst = 0.0;
  for (int r = 0; r < grid.rows(); ++r) {
    const CVector rebuilt = es.expand(field.weights.row(r).transpose());
    const CVector psi = grid.psi.row(r).transpose();
    worst = std::max(worst, (rebuilt - psi).norm() / psi.norm());
  }
  return worst;
}

std::vector<Complex> z_transform(const CVector& sequence, const std::vector<Complex>& betas,
                                 int origin) {
  std::vector<Complex> out;
  out.reserve(betas.size());
  for (const auto& beta : betas) {
    if (beta == 0.0) throw InvalidArgument("z_transform at beta = 0");
    Complex acc = 0.0;
    for (Eigen::Index n = 0; n < sequence.size(); ++n)
      if (sequence(n) != 0.0) acc += sequence(n) * std::pow(beta, -(static_cast<int>(n) - origin));
    out.push_back(acc);
  }
  return out;
}

CMatrix z_transform_lattice(const CVector& state, const std::vector<Complex>& betas,
                            int origin_site) {
  if (state.size() % kSitesPerCell != 0) throw InvalidArgument("state length is not a whole number of cells");
  const int cells = static_cast<int>(state.size()) / kSitesPerCell;
  if (origin_site < 0) origin_site = 2 * cells;
  if (origin_site >= state.size()) throw InvalidArgument("origin site out of range");
  const int origin = cell_of(origin_site);
  CMatrix out(kSitesPerCell, static_cast<Eigen::Index>(betas.size()));
  for (int s = 0; s < kSitesPerCell; ++s) {
    CVector seq(cells);
    for (int c = 0; c < cells; ++c) seq(c) = state(kSitesPerCell * c + s);
    const auto z = z_transform(seq, betas, origin);
    for (std::size_t b = 0; b < betas.size(); ++b) out(s, static_cast<Eigen::Index>(b)) = z[b];
  }
  return out;
}

WeightField nonbloch_weights(const EvolutionGrid& grid, const GBZCurve& curve, int origin_site) {
  const ModelParams& p = curve.params;
  if (grid.sites() != p.sites()) throw InvalidArgument("GBZ curve and grid sizes differ");
  double radius = 0.0;
  for (const auto& pt : curve.points) radius = std::max(radius, std::abs(pt.energy));
  const double tol = 1e-6 * std::max(radius, 1.0);

  WeightField f;
  f.axis = WeightAxis::gbz_beta;
  f.times = grid.times;
  std::vector<Complex> betas;
  std::vector<CMatrix> bras;  // 2 x 4 per point, rows ordered by branch
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& pt = curve.points[i];
    betas.push_back(pt.beta);
    CMatrix bra = CMatrix::Zero(2, 4);
    std::array<WeightCoordinate, 2> cols;
    bool flagged = pt.flagged;
    if (!flagged) {
      const auto es = biorthogonal_eigensystem(CMatrix(build_non_bloch(p, pt.beta).entries));
      std::array<std::pair<double, int>, 4> dist;
      for (int b = 0; b < 4; ++b)
        dist[b] = {std::min(std::abs(es.eigenvalues(b) - pt.energy),
                            std::abs(es.eigenvalues(b) + pt.energy)),
                   b};
      std::sort(dist.begin(), dist.end());
      flagged = !(dist[0].first < tol && dist[1].first < tol);
      int lo = dist[0].second, hi = dist[1].second;
      if (es.eigenvalues(lo).real() > es.eigenvalues(hi).real()) std::swap(lo, hi);
      bra.row(0) = es.left.row(lo);
      bra.row(1) = es.left.row(hi);
      cols[0].energy = es.eigenvalues(lo);
      cols[1].energy = es.eigenvalues(hi);
    }
    for (int br = 0; br < 2; ++br) {
      cols[br].beta = pt.beta;
      cols[br].band = static_cast<int>(i);
      cols[br].branch = br;
      cols[br].flagged = flagged;
      f.coordinates.push_back(cols[br]);
    }
    bras.push_back(bra);
  }

  f.weights = CMatrix::Zero(grid.rows(), f.columns());
  for (int r = 0; r < grid.rows(); ++r) {
    const CMatrix z = z_transform_lattice(grid.psi.row(r).transpose(), betas, origin_site);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const Eigen::Vector2cd g = bras[i] * z.col(static_cast<Eigen::Index>(i));
      f.weights(r, 2 * i) = g(0);
      f.weights(r, 2 * i + 1) = g(1);
    }
  }
  return f;
}

WeightField bz_fourier_weights(const EvolutionGrid& grid, const BandStructure& bands) {
  if (grid.sites() % kSitesPerCell != 0) throw InvalidArgument("grid is not a whole number of cells");
  const int cells = grid.sites() / kSitesPerCell;
  const int nk = static_cast<int>(bands.k.size());
  WeightField f;
  f.axis = WeightAxis::bz_k;
  f.times = grid.times;
  for (int b = 0; b < 4; ++b)
    for (int i = 0; i < nk; ++i) {
      WeightCoordinate c;
      c.k = bands.k[i];
      c.band = b;
      c.energy = bands.energies(b, i);
      f.coordinates.push_back(c);
    }
  // phases e^{-ik n} per (cell, k)
  CMatrix phase(cells, nk);
  for (int c = 0; c < cells; ++c)
    for (int i = 0; i < nk; ++i) phase(c, i) = std::exp(Complex(0.0, -bands.k[i] * c));

  f.weights.resize(grid.rows(), 4 * nk);
  for (int r = 0; r < grid.rows(); ++r) {
    CMatrix cellwise(kSitesPerCell, cells);
    for (int c = 0; c < cells; ++c)
      for (int s = 0; s < kSitesPerCell; ++s) cellwise(s, c) = grid.psi(r, kSitesPerCell * c + s);
    const CMatrix psik = cellwise * phase;  // 4 x nk
    for (int i = 0; i < nk; ++i) {
      const Eigen::Vector4cd k = bands.left[i] * psik.col(i);
      for (int b = 0; b < 4; ++b) f.weights(r, b * nk + i) = k(b);
    }
  }
  return normalized(f);
}

RMatrix group_velocity(const BandStructure& bands) {
  const Eigen::Index nk = bands.energies.cols();
  if (nk < 2) throw InvalidArgument("need at least two k points");
  RMatrix v(bands.energies.rows(), nk);
  for (Eigen::Index b = 0; b < bands.energies.rows(); ++b)
    for (Eigen::Index i = 0; i < nk; ++i) {
      const Eigen::Index lo = std::max<Eigen::Index>(i - 1, 0), hi = std::min(i + 1, nk - 1);
      v(b, i) = (bands.energies(b, hi).real() - bands.energies(b, lo).real()) / (bands.k[hi] - bands.k[lo]);
    }
  return v;
}

}  // namespace gt
