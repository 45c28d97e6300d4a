#include <doctest.h>

#include <cmath>

#include <glidetime/error.hpp>
#include <glidetime/spectral.hpp>

#include "support.hpp"

using namespace gt;
using gt::testing::point;

TEST_CASE("hermitian bands are real") {
  const auto bands = pbc_bands(point(2, 2), 65);
  CHECK(bands.energies.imag().cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(pbc_bands(point(2, 2), 4), InvalidArgument);
}

TEST_CASE("kramers-like pairs at the zone boundary") {
  CHECK(kramers_gap(point(4, 2)) < 1e-8);
  CHECK(kramers_gap(point(2, 2)) < 1e-10);
  CHECK(kramers_gap(point(4, 2), {kPi / 2}) > 0.1);
}

TEST_CASE("inner bands flip the sign of Im E across the zone boundary") {
  // Bands ordered by Re E at each k; the limit k -> +-pi from inside the zone.
  const auto minus = sorted_bloch_energies(point(4, 2), -kPi + 1e-3);
  const auto plus = sorted_bloch_energies(point(4, 2), kPi - 1e-3);
  for (int b : {1, 2}) {
    CHECK(std::abs(minus[b].imag()) > 0.1);
    CHECK(minus[b].imag() * plus[b].imag() < 0.0);
  }
}

TEST_CASE("continuity-tracked outer bands flip the sign of Im E across the zone boundary") {
  const auto bands = pbc_bands(point(4, 2), 129);
  const int last = static_cast<int>(bands.k.size()) - 1;
  for (int b : {0, 3}) CHECK(bands.energies(b, 0).imag() * bands.energies(b, last).imag() < 0.0);
  for (int b : {1, 2}) CHECK(bands.energies(b, 0).imag() * bands.energies(b, last).imag() > 0.0);
}

TEST_CASE("bands are conjugate under k -> -k") {
  const auto p = point(4, 2);
  for (double k : {0.3, 1.1, 2.5}) {
    const auto plus = sorted_bloch_energies(p, k);
    auto minus = sorted_bloch_energies(p, -k);
    for (auto& e : minus) e = std::conj(e);
    CHECK(gt::testing::multiset_distance(plus, minus) < 1e-8);
  }
}

TEST_CASE("continuity sorting keeps eigenvector overlaps diagonal") {
  const auto bands = pbc_bands(point(4, 2), 257);
  for (std::size_t i = 0; i + 1 < bands.k.size(); ++i) {
    const Matrix4c& r0 = bands.right[i];
    const Matrix4c& r1 = bands.right[i + 1];
    for (int b = 0; b < 4; ++b) {
      const double own = std::abs(r0.col(b).normalized().dot(r1.col(b).normalized()));
      for (int c = 0; c < 4; ++c)
        if (c != b) CHECK(own > std::abs(r0.col(b).normalized().dot(r1.col(c).normalized())));
    }
  }
}

TEST_CASE("zero modes of the nontrivial phase are edge modes") {
  const auto obc = obc_analysis(point(2, 0.5));
  int zeros = 0;
  for (Eigen::Index i = 0; i < obc.eigensystem.size(); ++i)
    if (std::abs(obc.eigensystem.eigenvalues(i)) < 1e-8) ++zeros;
  CHECK(zeros == 2);
  CHECK(obc.count(ModeKind::edge) == 2);
}

TEST_CASE("non-bloch symmetric phase has a real open spectrum") {
  const auto obc = obc_analysis(point(9, 6));
  CHECK(obc.eigensystem.eigenvalues.imag().cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("skin modes sit on the left in phase I and mirror on the right") {
  const auto p = point(2, 0.5);
  const auto left = obc_analysis(p);
  const auto right = obc_analysis(p.mirrored());
  const double middle = 0.5 * (p.sites() - 1);
  for (Eigen::Index i = 0; i < left.eigensystem.size(); ++i) {
    if (left.classification.kind[i] == ModeKind::edge) continue;
    CHECK(left.classification.center_of_mass[i] < middle);
  }
  for (Eigen::Index i = 0; i < right.eigensystem.size(); ++i) {
    if (right.classification.kind[i] == ModeKind::edge) continue;
    CHECK(right.classification.center_of_mass[i] > middle);
  }
}

TEST_CASE("complex zak phase") {
  CHECK(complex_zak_phase(point(2, 0.5), 128).total_occupied == doctest::Approx(kPi).epsilon(1e-3));
  CHECK(std::abs(complex_zak_phase(point(5, 4), 128).total_occupied) < 1e-3);
  CHECK(complex_zak_phase(point(2, 2), 128).total_occupied == doctest::Approx(kPi).epsilon(1e-3));
  const auto gapless = complex_zak_phase(point(2, 4), 128);
  CHECK(gapless.gapless);
  CHECK(std::isnan(gapless.total_occupied));
  CHECK_THROWS_AS(complex_zak_phase(point(2, 2), 32), InvalidArgument);
}

TEST_CASE("zak phase is stable under grid doubling") {
  for (auto p : {point(2, 0.5), point(5, 4), point(1, 0.5), point(7, 6)}) {
    const auto a = complex_zak_phase(p, 128), b = complex_zak_phase(p, 256);
    CHECK(std::abs(a.total_occupied - b.total_occupied) < 1e-4);
  }
}

TEST_CASE("zak phase is quantized on random gapped points") {
  int gapped = 0;
  for (int s = 0; s < 30; ++s) {
    const auto p = point(gt::testing::uniform(0.2, 10), gt::testing::uniform(0.2, 10));
    const auto z = complex_zak_phase(p, 128);
    if (z.gapless || z.line_gap < 1e-2) continue;
    ++gapped;
    CHECK(std::min(std::abs(z.total_occupied), std::abs(z.total_occupied - kPi)) < 1e-3);
  }
  CHECK(gapped > 5);
}

TEST_CASE("energy winding") {
  const auto [neg, pos] = pbc_loop_centroids(point(2, 0.5));
  CHECK(energy_winding(point(2, 0.5), neg) == -1);
  CHECK(energy_winding(point(2, 0.5), pos) == -1);
  const auto [neg4, pos4] = pbc_loop_centroids(point(2, 4));
  CHECK(energy_winding(point(2, 4), neg4) == 1);
  CHECK(energy_winding(point(4, 2), Complex(100.0)) == 0);
}

TEST_CASE("energy winding flips under t3 <-> t4 and survives refinement") {
  for (auto p : {point(4, 2), point(5, 4), point(2, 0.5)}) {
    const auto [neg, pos] = pbc_loop_centroids(p);
    const int w = energy_winding(p, neg, 256);
    CHECK(energy_winding(p, neg, 1024) == w);
    CHECK(energy_winding(p, neg * 1.01, 256) == w);
    CHECK(energy_winding(p.mirrored(), neg, 256) == -w);
  }
}

TEST_CASE("energy winding rejects a reference on the spectrum") {
  const auto e = sorted_bloch_energies(point(4, 2), 0.7)[0];
  CHECK_THROWS_AS(energy_winding(point(4, 2), e), InvalidArgument);
}
