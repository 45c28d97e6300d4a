#include "glidetime/lattice.hpp"

#include <cmath>
#include <string>

#include "glidetime/error.hpp"

namespace gt {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::none: return "none";
  }
  return "none";
}

void ModelParams::validate() const {
  for (double t : {t1, t2, t3, t4}) {
    if (!std::isfinite(t)) throw InvalidArgument("couplings must be finite");
  }
  if (n_cells < 2) throw InvalidArgument("n_cells must be >= 2, got " + std::to_string(n_cells));
}

ModelParams ModelParams::mirrored() const {
  ModelParams p = *this;
  std::swap(p.t3, p.t4);
  return p;
}

ModelParams ModelParams::with_couplings(double t3_new, double t4_new) const {
  ModelParams p = *this;
  p.t3 = t3_new;
  p.t4 = t4_new;
  return p;
}

ModelParams ModelParams::with_cells(int n) const {
  ModelParams p = *this;
  p.n_cells = n;
  return p;
}

namespace {

constexpr int A = 0, B = 1, C = 2, D = 3;

Matrix4c momentum_entries(const ModelParams& p, Complex beta) {
  Matrix4c h = Matrix4c::Zero();
  const Complex inv = 1.0 / beta;
  // a-c chain: a_n-c_n (t2), c_n-a_{n+1} (t1); b-d chain: b_n-d_n (t1), d_n-b_{n+1} (t2)
  h(A, C) = p.t2 + p.t1 * inv;
  h(C, A) = p.t2 + p.t1 * beta;
  h(B, D) = p.t1 + p.t2 * inv;
  h(D, B) = p.t1 + p.t2 * beta;
  h(A, B) = p.t4;
  h(B, A) = p.t3;
  h(C, D) = p.t3;
  h(D, C) = p.t4;
  return h;
}

}  // namespace

MomentumMatrix build_bloch(const ModelParams& params, double k) {
  params.validate();
  return {momentum_entries(params, std::exp(kI * k)), Complex(k, 0.0)};
}

MomentumMatrix build_non_bloch(const ModelParams& params, Complex beta) {
  params.validate();
  if (beta == Complex(0.0, 0.0)) throw InvalidArgument("beta must be nonzero");
  return {momentum_entries(params, beta), -kI * std::log(beta)};
}

RealSpaceMatrix build_real_space(const ModelParams& params, Boundary boundary) {
  params.validate();
  const int n = params.n_cells;
  RMatrix h = RMatrix::Zero(params.sites(), params.sites());
  for (int cell = 0; cell < n; ++cell) {
    const int a = site_index(cell, Sublattice::a), b = a + 1, c = a + 2, d = a + 3;
    h(a, c) = h(c, a) = params.t2;
    h(b, d) = h(d, b) = params.t1;
    h(a, b) = params.t4;
    h(b, a) = params.t3;
    h(c, d) = params.t3;
    h(d, c) = params.t4;
    const bool last = cell + 1 == n;
    if (last && boundary == Boundary::open) continue;
    const int next = last ? 0 : cell + 1;
    const int a1 = site_index(next, Sublattice::a), b1 = a1 + 1;
    h(a1, c) = h(c, a1) = params.t1;
    h(b1, d) = h(d, b1) = params.t2;
  }
  return {std::move(h), boundary, n};
}

Matrix4c glide_operator(Complex k) {
  Eigen::Matrix2cd s1, s2;
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  const auto kron = [](const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) {
    Matrix4c out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = x(i, j) * y;
    return out;
  };
  return std::exp(kI * k / 2.0) *
         (std::cos(k / 2.0) * kron(s1, s1) + std::sin(k / 2.0) * kron(s2, s1));
}

SymmetryResiduals symmetry_residuals(const ModelParams& params, double k) {
  const Matrix4c h = build_bloch(params, k).entries;
  const Matrix4c h_minus = build_bloch(params, -k).entries;
  const Matrix4c g = glide_operator(k);

  SymmetryResiduals out;
  out.glide = (g * h * g.inverse() - h).cwiseAbs().maxCoeff();
  out.trs = (h.conjugate() - h_minus).cwiseAbs().maxCoeff();

  // theta = G T maps a state at k to one at -k; applied twice:
  // theta^2 psi = G(k) conj(G(-k) conj(psi)) = G(k) conj(G(-k)) psi.
  const Matrix4c theta_sq = g * glide_operator(-k).conjugate();
  Eigen::ComplexEigenSolver<Matrix4c> es(h);
  const Complex phase = std::exp(kI * k);
  int lowest = 0;
  for (int i = 1; i < 4; ++i) {
    if (es.eigenvalues()(i).real() < es.eigenvalues()(lowest).real()) lowest = i;
  }
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4cd psi = es.eigenvectors().col(i).normalized();
    const Eigen::Vector4cd image = theta_sq * psi;
    out.theta_sq = std::max(out.theta_sq, (image - phase * psi).norm());
    if (i == lowest) out.theta_sq_factor = psi.dot(image);
  }
  return out;
}

}  // namespace gt
