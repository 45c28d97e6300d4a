#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "glidetime/spectral.hpp"

namespace gt {

using Quad = boost::multiprecision::float128;
using QComplex = std::complex<Quad>;
using QMatrix = Eigen::Matrix<QComplex, Eigen::Dynamic, Eigen::Dynamic>;
using QVector = Eigen::Matrix<QComplex, Eigen::Dynamic, 1>;

struct ExtendedVectors {
  QVector eigenvalues;
  QMatrix right;
  QMatrix left;
};

inline QComplex to_quad(Complex z) { return {Quad(z.real()), Quad(z.imag())}; }
inline Complex to_double(const QComplex& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace gt
