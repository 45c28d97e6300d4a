#include "glidetime/polynomial.hpp"

#include <cmath>

#include "glidetime/error.hpp"

namespace gt {

Complex polyval(const std::vector<Complex>& coeffs, Complex x) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

Complex polyder_val(const std::vector<Complex>& c, Complex x) {
  Complex acc = 0.0;
  for (std::size_t m = c.size(); m-- > 1;) acc = acc * x + double(m) * c[m];
  return acc;
}

}  // namespace

std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1) return {};
  if (coeffs.back() == 0.0) throw InvalidArgument("leading coefficient is zero");

  CMatrix companion = CMatrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / coeffs.back();
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  if (es.info() != Eigen::Success) throw NumericalFailure("companion eigensolve failed");

  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
  for (auto& r : roots) {
    for (int it = 0; it < 4; ++it) {
      const Complex d = polyder_val(coeffs, r);
      if (d == 0.0) break;
      const Complex step = polyval(coeffs, r) / d;
      const Complex next = r - step;
      if (!(std::abs(polyval(coeffs, next)) < std::abs(polyval(coeffs, r)))) break;
      r = next;
    }
  }
  return roots;
}

Complex BivariatePolynomial::operator()(Complex x, Complex y) const {
  Complex acc = 0.0;
  for (Eigen::Index m = coeffs.rows(); m-- > 0;) {
    Complex row = 0.0;
    for (Eigen::Index l = coeffs.cols(); l-- > 0;) row = row * y + coeffs(m, l);
    acc = acc * x + row;
  }
  return acc;
}

namespace {

// sum_{m,l} c(m,l) f_m(x) g_l(y) with f, g the requested derivative orders.
Complex eval_deriv(const CMatrix& c, Complex x, Complex y, int ox, int oy) {
  Complex acc = 0.0;
  for (Eigen::Index m = ox; m < c.rows(); ++m) {
    double fx = 1.0;
    for (int q = 0; q < ox; ++q) fx *= double(m - q);
    const Complex xm = fx * std::pow(x, int(m - ox));
    for (Eigen::Index l = oy; l < c.cols(); ++l) {
      double fy = 1.0;
      for (int q = 0; q < oy; ++q) fy *= double(l - q);
      acc += c(m, l) * xm * fy * std::pow(y, int(l - oy));
    }
  }
  return acc;
}

}  // namespace

Complex BivariatePolynomial::dx(Complex x, Complex y) const { return eval_deriv(coeffs, x, y, 1, 0); }
Complex BivariatePolynomial::dy(Complex x, Complex y) const { return eval_deriv(coeffs, x, y, 0, 1); }
Complex BivariatePolynomial::dxx(Complex x, Complex y) const { return eval_deriv(coeffs, x, y, 2, 0); }
Complex BivariatePolynomial::dxy(Complex x, Complex y) const { return eval_deriv(coeffs, x, y, 1, 1); }

std::vector<Complex> BivariatePolynomial::in_x(Complex y) const {
  std::vector<Complex> out(coeffs.rows());
  for (Eigen::Index m = 0; m < coeffs.rows(); ++m) {
    Complex row = 0.0;
    for (Eigen::Index l = coeffs.cols(); l-- > 0;) row = row * y + coeffs(m, l);
    out[m] = row;
  }
  return out;
}

}  // namespace gt
