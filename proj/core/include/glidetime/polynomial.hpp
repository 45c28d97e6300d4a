#pragma once

#include <vector>

#include "glidetime/types.hpp"

namespace gt {

/// Horner evaluation; coefficients in ascending powers.
Complex polyval(const std::vector<Complex>& coeffs, Complex x);

/// All roots of sum_m coeffs[m] x^m. Companion-matrix eigenvalues followed by
/// Newton polishing on the original polynomial. Trailing (leading-power)
/// coefficients that are exactly zero are dropped by the caller.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeffs);

/// P(x, y) = sum_{m,l} c(m, l) x^m y^l, dense.
struct BivariatePolynomial {
  CMatrix coeffs;

  Complex operator()(Complex x, Complex y) const;
  Complex dx(Complex x, Complex y) const;
  Complex dy(Complex x, Complex y) const;
  Complex dxx(Complex x, Complex y) const;
  Complex dxy(Complex x, Complex y) const;

  /// Coefficients of P(., y) in ascending powers of x.
  std::vector<Complex> in_x(Complex y) const;

  /// Fits a polynomial of degrees (dx, dy) from samples of `f` on circles of
  /// radius rx and ry (a 2-D discrete Fourier transform).
  template <class F>
  static BivariatePolynomial fit(F&& f, int deg_x, int deg_y, double rx, double ry);
};

template <class F>
BivariatePolynomial BivariatePolynomial::fit(F&& f, int deg_x, int deg_y, double rx, double ry) {
  const int nx = deg_x + 1, ny = deg_y + 1;
  CMatrix samples(nx, ny);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      const Complex x = std::polar(rx, 2.0 * kPi * a / nx);
      const Complex y = std::polar(ry, 2.0 * kPi * b / ny);
      samples(a, b) = f(x, y);
    }
  BivariatePolynomial p;
  p.coeffs = CMatrix::Zero(nx, ny);
  for (int m = 0; m < nx; ++m)
    for (int l = 0; l < ny; ++l) {
      Complex acc = 0.0;
      for (int a = 0; a < nx; ++a)
        for (int b = 0; b < ny; ++b)
          acc += samples(a, b) * std::polar(1.0, -2.0 * kPi * (double(a) * m / nx + double(b) * l / ny));
      p.coeffs(m, l) = acc / (double(nx * ny) * std::pow(rx, m) * std::pow(ry, l));
    }
  return p;
}

}  // namespace gt
