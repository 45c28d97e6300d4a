#include <algorithm>
#include <cmath>
#include <type_traits>

#include "extended.hpp"
#include "glidetime/error.hpp"

namespace gt {

namespace {

template <class Real>
using RealMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using CplxMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
Real abs_of(const std::complex<Real>& z) {
  using std::sqrt;
  return sqrt(z.real() * z.real() + z.imag() * z.imag());
}

// Normalizes right columns to unit length, rescales left rows to keep
// left*right = 1 and records the worst |<l_i|r_i>| of the unit pairs.
template <class Real>
double normalize_pairs(CplxMat<Real>& right, CplxMat<Real>& left) {
  double worst = 1.0;
  for (Eigen::Index i = 0; i < right.cols(); ++i) {
    Real rn(0), ln(0);
    for (Eigen::Index r = 0; r < right.rows(); ++r) {
      rn += std::norm(right(r, i));
      ln += std::norm(left(i, r));
    }
    using std::sqrt;
    rn = sqrt(rn);
    ln = sqrt(ln);
    right.col(i) /= std::complex<Real>(rn);
    left.row(i) *= std::complex<Real>(rn);
    const double overlap = static_cast<double>(Real(1) / (rn * ln));
    worst = std::min(worst, overlap);
  }
  return worst;
}

template <class Real>
Complex to_double(const std::complex<Real>& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Rescales pairs to ||L_i|| = ||R_i|| (keeps <L_i|R_i> = 1). This keeps
// sum_k |L_ik||R_kj| small, which bounds the rounding of <L_i|R_j>.
template <class Real>
void balance_pairs(CplxMat<Real>& right, CplxMat<Real>& left) {
  using std::sqrt;
  for (Eigen::Index j = 0; j < right.cols(); ++j) {
    Real rn(0), ln(0);
    for (Eigen::Index r = 0; r < right.rows(); ++r) {
      rn += std::norm(right(r, j));
      ln += std::norm(left(j, r));
    }
    const Real s = sqrt(sqrt(rn / ln));
    right.col(j) /= std::complex<Real>(s);
    left.row(j) *= std::complex<Real>(s);
  }
}

template <class Real>
BiorthogonalEigensystem solve_general(const RealMat<Real>& scaled, const Eigen::VectorXd& gauge,
                                      double threshold) {
  Eigen::EigenSolver<RealMat<Real>> es(scaled, true);
  if (es.info() != Eigen::Success) throw NumericalFailure("real Schur iteration did not converge");
  CplxMat<Real> right = es.eigenvectors();
  Eigen::PartialPivLU<CplxMat<Real>> lu(right);
  CplxMat<Real> left = lu.inverse();
  const double flag = normalize_pairs<Real>(right, left);

  const Eigen::Index n = scaled.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real g = gauge.size() ? Real(gauge(i)) : Real(1);
    right.row(i) *= std::complex<Real>(g);
    left.col(i) /= std::complex<Real>(g);
  }
  balance_pairs<Real>(right, left);

  BiorthogonalEigensystem out;
  out.eigenvalues.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = to_double(es.eigenvalues()(j));
    for (Eigen::Index i = 0; i < n; ++i) {
      out.right(i, j) = to_double(right(i, j));
      out.left(j, i) = to_double(left(j, i));
    }
  }
  if constexpr (std::is_same_v<Real, Quad>) {
    auto ext = std::make_shared<ExtendedVectors>();
    ext->eigenvalues = es.eigenvalues();
    ext->right = std::move(right);
    ext->left = std::move(left);
    out.extended = std::move(ext);
  }
  out.condition_flag = flag;
  out.degeneracy_warning = flag < threshold;
  return out;
}

bool is_symmetric(const RMatrix& m) { return m == m.transpose(); }

QVector quad_vector(const CVector& v) {
  QVector q(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) q(i) = to_quad(v(i));
  return q;
}

CVector double_vector(const QVector& q) {
  CVector v(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) v(i) = to_double(q(i));
  return v;
}

}  // namespace

double BiorthogonalEigensystem::biorthogonality_error() const {
  if (extended) {
    const QMatrix overlap = extended->left * extended->right;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < overlap.rows(); ++i)
      for (Eigen::Index j = 0; j < overlap.cols(); ++j) {
        const QComplex d = overlap(i, j) - QComplex(Quad(i == j ? 1 : 0));
        worst = std::max(worst, std::abs(to_double(d)));
      }
    return worst;
  }
  const CMatrix overlap = left * right;
  return (overlap - CMatrix::Identity(overlap.rows(), overlap.cols())).cwiseAbs().maxCoeff();
}

double BiorthogonalEigensystem::reconstruction_error(const CMatrix& matrix) const {
  if (extended) {
    const QMatrix rebuilt = extended->right * extended->eigenvalues.asDiagonal() * extended->left;
    double num = 0.0;
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
      for (Eigen::Index j = 0; j < matrix.cols(); ++j)
        num += std::norm(to_double(rebuilt(i, j) - to_quad(matrix(i, j))));
    return std::sqrt(num) / matrix.norm();
  }
  const CMatrix rebuilt = right * eigenvalues.asDiagonal() * left;
  return (rebuilt - matrix).norm() / matrix.norm();
}

CVector BiorthogonalEigensystem::project(const CVector& psi) const {
  if (extended) return double_vector(QVector(extended->left * quad_vector(psi)));
  return left * psi;
}

CVector BiorthogonalEigensystem::expand(const CVector& coeffs) const {
  if (extended) return double_vector(QVector(extended->right * quad_vector(coeffs)));
  return right * coeffs;
}

CVector BiorthogonalEigensystem::propagate(const CVector& psi, double t, double gamma) const {
  if (extended) {
    QVector c = extended->left * quad_vector(psi);
    const Quad qt(t), qg(gamma);
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      const QComplex& e = extended->eigenvalues(j);
      using std::cos, std::exp, std::sin;
      const Quad mag = exp((e.imag() - qg) * qt);
      const Quad ph = -e.real() * qt;
      c(j) *= QComplex(mag * cos(ph), mag * sin(ph));
    }
    return double_vector(QVector(extended->right * c));
  }
  CVector c = left * psi;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const Complex e = eigenvalues(j);
    c(j) *= std::exp(Complex((e.imag() - gamma) * t, -e.real() * t));
  }
  return right * c;
}

double BiorthogonalEigensystem::completeness_residual(const CVector& psi) const {
  if (extended) {
    const QVector q = quad_vector(psi);
    const QVector d = extended->right * QVector(extended->left * q) - q;
    return double_vector(d).norm() / psi.norm();
  }
  return (right * (left * psi) - psi).norm() / psi.norm();
}

BiorthogonalEigensystem biorthogonal_eigensystem(const CMatrix& matrix,
                                                 const EigenOptions& options) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("matrix must be square");
  if (!matrix.allFinite()) throw InvalidArgument("matrix entries must be finite");
  const Eigen::Index n = matrix.rows();

  if (matrix == matrix.adjoint()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix);
    BiorthogonalEigensystem out;
    out.eigenvalues = es.eigenvalues().cast<Complex>();
    out.right = es.eigenvectors();
    out.left = out.right.adjoint();
    return out;
  }

  CMatrix scaled = matrix;
  const bool gauged = options.gauge.size() == n;
  if (gauged) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) scaled(i, j) *= options.gauge(j) / options.gauge(i);
  }
  Eigen::ComplexEigenSolver<CMatrix> es(scaled, true);
  if (es.info() != Eigen::Success) throw NumericalFailure("complex Schur iteration did not converge");
  CMatrix right = es.eigenvectors();
  CMatrix left = Eigen::PartialPivLU<CMatrix>(right).inverse();
  const double flag = normalize_pairs<double>(right, left);
  if (gauged) {
    right = options.gauge.asDiagonal() * right;
    left = left * options.gauge.cwiseInverse().asDiagonal();
  }
  balance_pairs<double>(right, left);
  BiorthogonalEigensystem out;
  out.eigenvalues = es.eigenvalues();
  out.right = std::move(right);
  out.left = std::move(left);
  out.condition_flag = flag;
  out.degeneracy_warning = flag < options.degeneracy_threshold;
  return out;
}

BiorthogonalEigensystem biorthogonal_eigensystem(const RMatrix& matrix,
                                                 const EigenOptions& options) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("matrix must be square");
  if (!matrix.allFinite()) throw InvalidArgument("matrix entries must be finite");
  const Eigen::Index n = matrix.rows();

  if (is_symmetric(matrix)) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(matrix);
    BiorthogonalEigensystem out;
    out.eigenvalues = es.eigenvalues().cast<Complex>();
    out.right = es.eigenvectors().cast<Complex>();
    out.left = out.right.transpose();
    return out;
  }

  const bool gauged = options.gauge.size() == n;
  if (options.precision == Precision::extended) {
    RealMat<Quad> scaled(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        Quad v = matrix(i, j);
        if (gauged && v != 0) v = v * Quad(options.gauge(j)) / Quad(options.gauge(i));
        scaled(i, j) = v;
      }
    return solve_general<Quad>(scaled, gauged ? options.gauge : Eigen::VectorXd(),
                               options.degeneracy_threshold);
  }
  RMatrix scaled = matrix;
  if (gauged) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (scaled(i, j) != 0.0) scaled(i, j) *= options.gauge(j) / options.gauge(i);
  }
  return solve_general<double>(scaled, gauged ? options.gauge : Eigen::VectorXd(),
                               options.degeneracy_threshold);
}

}  // namespace gt
