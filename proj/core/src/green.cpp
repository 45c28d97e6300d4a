#include <cmath>
#include <limits>

#include "extended.hpp"
#include "glidetime/error.hpp"
#include "glidetime/gbz.hpp"

namespace gt {

namespace {

Complex resolvent_entry(const ModelParams& p, Complex omega, int i, int j, Precision precision) {
  const auto h = build_real_space(p, Boundary::open).entries;
  const Eigen::VectorXd g = p.hermitian() ? Eigen::VectorXd::Ones(p.sites()) : skin_gauge(p);
  const Eigen::Index n = h.rows();
  // (omega - D^-1 H D)^-1 = D^-1 (omega - H)^-1 D
  if (precision == Precision::extended) {
    QMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) {
        Quad v = -h(r, c);
        if (v != 0) v = v * Quad(g(c)) / Quad(g(r));
        a(r, c) = QComplex(v, Quad(0));
      }
    for (Eigen::Index r = 0; r < n; ++r) a(r, r) += QComplex(Quad(omega.real()), Quad(omega.imag()));
    QVector rhs = QVector::Zero(n);
    rhs(j) = QComplex(Quad(1), Quad(0));
    const QVector x = a.partialPivLu().solve(rhs);
    const Complex v(static_cast<double>(x(i).real()), static_cast<double>(x(i).imag()));
    return v * g(i) / g(j);
  }
  CMatrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = h(r, c) == 0.0 ? 0.0 : -h(r, c) * g(c) / g(r);
  a.diagonal().array() += omega;
  CVector rhs = CVector::Zero(n);
  rhs(j) = 1.0;
  const CVector x = a.partialPivLu().solve(rhs);
  return x(i) * g(i) / g(j);
}

}  // namespace

Complex green_element(const ModelParams& params, Complex omega, int i, int j, int n_cells,
                      const GreenOptions& options, const GBZCurve* curve) {
  const ModelParams p = params.with_cells(n_cells);
  p.validate();
  if (i < 0 || j < 0 || i >= p.sites() || j >= p.sites()) throw InvalidArgument("site index out of range");

  const auto obc = obc_eigensystem(p);
  const double radius = obc.eigenvalues.cwiseAbs().maxCoeff();
  if ((obc.eigenvalues.array() - omega).abs().minCoeff() < 1e-8 * (1.0 + radius))
    throw InvalidArgument("omega lies on the OBC spectrum");

  if (options.method == GreenMethod::resolvent) return resolvent_entry(p, omega, i, j, options.precision);

  const auto roots = characteristic_beta_roots(p, omega);
  if (roots.degree_collapse || roots.roots.size() != 4)
    throw NumericalFailure("characteristic polynomial degenerates at omega");
  const Complex b2 = roots.roots[1], b3 = roots.roots[2];
  if (std::abs(b3) / std::abs(b2) - 1.0 < 1e-9)
    throw InvalidArgument("omega lies on the continuum spectrum (middle roots coincide in modulus)");

  GBZCurve local;
  if (curve == nullptr) {
    local = compute_gbz(p, n_cells);
    curve = &local;
  }
  if (curve->flagged_count() > 0) throw NumericalFailure("GBZ curve has flagged points");
  // The arg-ordered polygon through both loops only classifies roots outside
  // the annulus the loops occupy.
  if (!p.hermitian() &&
      (std::abs(b2) > curve->max_modulus() * (1.0 + 1e-9) ||
       std::abs(b3) < curve->min_modulus() * (1.0 - 1e-9) ||
       (std::abs(b2) < curve->min_modulus() && gbz_winding_around(*curve, b2) == 0) ||
       (std::abs(b3) > curve->max_modulus() && gbz_winding_around(*curve, b3) != 0)))
    throw NumericalFailure("circle |beta| = rho does not separate the same roots as the GBZ");

  const double rho = std::sqrt(std::abs(b2) * std::abs(b3));
  const int dn = cell_of(i) - cell_of(j);
  const int si = i % kSitesPerCell, sj = j % kSitesPerCell;
  auto integrand = [&](double theta) {
    const Complex beta = std::polar(rho, theta);
    const Matrix4c a = omega * Matrix4c::Identity() - build_non_bloch(p, beta).entries;
    Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
    rhs(sj) = 1.0;
    const Eigen::Vector4cd x = a.partialPivLu().solve(rhs);
    return std::pow(beta, dn) * x(si);
  };

  // trapezoid on the circle: measure d beta / (2 pi i beta) = d theta / 2 pi
  int n = 256;
  Complex sum = 0.0;
  double abs_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex f = integrand(2.0 * kPi * k / n);
    sum += f;
    abs_sum += std::abs(f);
  }
  Complex value = sum / double(n);
  while (n < options.max_nodes) {
    for (int k = 0; k < n; ++k) {
      const Complex f = integrand(2.0 * kPi * (k + 0.5) / n);
      sum += f;
      abs_sum += std::abs(f);
    }
    n *= 2;
    const Complex next = sum / double(n);
    // below this the sum is cancellation noise
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * abs_sum / n;
    const bool done = std::abs(next - value) <= options.tol * std::abs(next) + floor;
    value = next;
    if (done) return value;
  }
  throw NumericalFailure("contour quadrature did not converge");
}

}  // namespace gt
