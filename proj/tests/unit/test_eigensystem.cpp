#include <doctest.h>

#include <glidetime/error.hpp>
#include <glidetime/spectral.hpp>

#include "support.hpp"

using namespace gt;
using gt::testing::point;

namespace {

RMatrix random_matrix(int n) {
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gt::testing::uniform(-1, 1);
  return m;
}

}  // namespace

TEST_CASE("open chain eigensystem is biorthogonal and complete") {
  const auto p = point(2, 0.5);
  const auto es = obc_eigensystem(p);
  CHECK(es.size() == p.sites());
  CHECK(es.biorthogonality_error() < 1e-8);
  CHECK(es.reconstruction_error(build_real_space(p, Boundary::open).entries.cast<Complex>()) < 1e-8);
}

TEST_CASE("left vectors agree with eigenvectors of the transpose") {
  const RMatrix m = random_matrix(8);
  const auto es = biorthogonal_eigensystem(m);
  Eigen::EigenSolver<RMatrix> adj(m.transpose());
  for (Eigen::Index i = 0; i < es.size(); ++i) {
    // <L_i| is a left eigenvector: the transpose of an eigenvector of M^T for E_i.
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < adj.eigenvalues().size(); ++j)
      if (std::abs(adj.eigenvalues()(j) - es.eigenvalues(i)) <
          std::abs(adj.eigenvalues()(best) - es.eigenvalues(i)))
        best = j;
    const CVector u = adj.eigenvectors().col(best).normalized();
    const CVector l = es.left.row(i).transpose().normalized();
    CHECK(std::abs(u.dot(l)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("random real matrix expansion") {
  for (int s = 0; s < 10; ++s) {
    const RMatrix m = random_matrix(8);
    const auto es = biorthogonal_eigensystem(m);
    CHECK(es.biorthogonality_error() < 1e-10);
    CHECK(es.reconstruction_error(m.cast<Complex>()) < 1e-12);
  }
}

TEST_CASE("complex input runs the general solver") {
  CMatrix m = CMatrix::Random(6, 6);
  const auto es = biorthogonal_eigensystem(m);
  CHECK(es.biorthogonality_error() < 1e-10);
  CHECK(es.reconstruction_error(m) < 1e-12);
  CHECK_THROWS_AS(biorthogonal_eigensystem(CMatrix(3, 4)), InvalidArgument);
}

TEST_CASE("hermitian input gives conjugate left vectors") {
  const auto es = obc_eigensystem(point(2.5, 2.5));
  for (Eigen::Index i = 0; i < es.size(); ++i) {
    const Complex o = es.left.row(i).conjugate().dot(es.right.col(i));
    CHECK(std::abs(o) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("extended precision keeps biorthogonality at 160 sites") {
  for (auto p : {point(2, 0.5, 40), point(2, 4, 40), point(5, 4, 40)}) {
    const auto es = obc_eigensystem(p, Precision::extended);
    CHECK(es.has_extended());
    CHECK(es.biorthogonality_error() < 1e-8);
  }
}

TEST_CASE("projection round trip") {
  const auto p = point(4, 2);
  const auto es = obc_eigensystem(p, Precision::extended);
  CVector psi = CVector::Zero(p.sites());
  psi(80) = 1.0;
  psi(13) = Complex(0.3, -0.2);
  CHECK(es.completeness_residual(psi) < 1e-12);
  // coefficients pass through double between the two products
  CHECK((es.expand(es.project(psi)) - psi).norm() < 1e-9);
  CHECK((es.propagate(psi, 0.0) - psi).norm() < 1e-12);
}

TEST_CASE("propagate composes in time") {
  const auto p = point(4, 2, 20);
  const auto es = obc_eigensystem(p, Precision::extended);
  const CVector psi = CVector::Unit(p.sites(), 40);
  const CVector a = es.propagate(es.propagate(psi, 1.5), 2.0);
  const CVector b = es.propagate(psi, 3.5);
  CHECK((a - b).norm() / b.norm() < 1e-10);
}

TEST_CASE("defective matrix raises the degeneracy warning") {
  RMatrix m(2, 2);
  m << 1.0, 1.0, 1e-20, 1.0;
  const auto es = biorthogonal_eigensystem(m);
  CHECK(es.degeneracy_warning);
  CHECK(es.condition_flag < 1e-8);
}

TEST_CASE("skin gauge follows the skin direction") {
  CHECK(skin_gauge_ratio(point(2, 0.5)) < 1.0);
  CHECK(skin_gauge_ratio(point(2, 4)) > 1.0);
  CHECK(skin_gauge_ratio(point(2, 2)) == doctest::Approx(1.0));
}
