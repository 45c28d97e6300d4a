#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace gt {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Sites per unit cell, in basis order (a, b, c, d).
inline constexpr int kSitesPerCell = 4;

enum class Sublattice : int { a = 0, b = 1, c = 2, d = 3 };

enum class Direction { left, right, none };

const char* to_string(Direction d);

/// Arithmetic used by the dense eigensolvers. `extended` runs the real Schur
/// decomposition in IEEE quad precision (113-bit significand); results are
/// still handed back in double.
enum class Precision { standard, extended };

}  // namespace gt
