#include <doctest.h>

#include <algorithm>

#include <glidetime/decompose.hpp>
#include <glidetime/error.hpp>

#include "support.hpp"

using namespace gt;
using gt::testing::point;

namespace {

std::vector<double> grid_k(int n) {
  std::vector<double> k;
  for (int m = 0; m < n; ++m) k.push_back(-kPi + 2.0 * kPi * m / n);
  return k;
}

}  // namespace

TEST_CASE("mode weights reconstruct the state") {
  const auto p = point(4, 2);
  const auto es = obc_eigensystem(p, Precision::extended);
  const auto g = evolve(p, es, delta_state(p.n_cells), uniform_times(20, 11));
  const auto w = obc_mode_weights(g, es);
  CHECK(w.axis == WeightAxis::obc_mode);
  CHECK(w.columns() == p.sites());
  CHECK(reconstruction_residual(w, g, es) < 1e-8);
}

TEST_CASE("hermitian evolution leaves the edge modes dark") {
  const auto p = point(2.5, 2.5);
  const auto obc = obc_analysis(p);
  const auto g = evolve(p, obc.eigensystem, delta_state(p.n_cells), uniform_times(30, 7));
  const auto w = obc_mode_weights(g, obc.eigensystem);
  REQUIRE(obc.count(ModeKind::edge) == 2);
  for (int r = 0; r < g.rows(); ++r) {
    double bulk = 0.0;
    for (int j = 0; j < w.columns(); ++j) {
      if (obc.classification.kind[j] == ModeKind::edge)
        CHECK(std::abs(w.weights(r, j)) < 1e-6);
      else
        bulk += std::norm(w.weights(r, j));
    }
    CHECK(bulk == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("late-time mode weight sits on the most unstable modes") {
  const auto p = point(2, 9);
  const auto es = obc_eigensystem(p, Precision::extended);
  const auto w = normalized(obc_mode_weights(evolve(p, es, delta_state(p.n_cells), {0.0, 50.0}), es));
  const double top = es.eigenvalues.imag().maxCoeff();
  double mass = 0.0;
  for (int j = 0; j < w.columns(); ++j)
    if (es.eigenvalues(j).imag() > top - 1e-3) mass += std::norm(w.weights(1, j));
  CHECK(mass > 0.7);
}

TEST_CASE("normalized weight rows have unit norm") {
  const auto p = point(4, 2);
  const auto es = obc_eigensystem(p);
  const auto w = normalized(obc_mode_weights(evolve(p, es, delta_state(p.n_cells), uniform_times(10, 5)), es));
  CHECK(w.normalized_per_instant);
  for (int r = 0; r < 5; ++r) CHECK(std::abs(w.weights.row(r).norm() - 1.0) < 1e-12);
}

TEST_CASE("z-transform shift property") {
  for (int s = 0; s < 100; ++s) {
    const int n = 12, shift = static_cast<int>(gt::testing::uniform(0, 6));
    CVector xi = CVector::Zero(n + 6), moved = CVector::Zero(n + 6);
    for (int i = 0; i < n; ++i) xi(i) = Complex(gt::testing::uniform(-1, 1), gt::testing::uniform(-1, 1));
    for (int i = 0; i < n; ++i) moved(i + shift) = xi(i);
    const std::vector<Complex> betas{std::polar(gt::testing::uniform(0.5, 1.5), gt::testing::uniform(-kPi, kPi))};
    const Complex a = z_transform(moved, betas, 0)[0];
    const Complex b = std::pow(betas[0], -shift) * z_transform(xi, betas, 0)[0];
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("z-transform of a delta at the origin is one") {
  CVector v = CVector::Zero(9);
  v(4) = 1.0;
  for (const auto& z : z_transform(v, {Complex(0.3, 0.2), Complex(-4.0), Complex(1.0)}, 4))
    CHECK(std::abs(z - Complex(1.0)) < 1e-15);
  CHECK_THROWS_AS(z_transform(v, {Complex(0.0)}, 4), InvalidArgument);
}

TEST_CASE("z-transform on the unit circle is the Fourier transform") {
  CVector v(16);
  for (int i = 0; i < 16; ++i) v(i) = Complex(gt::testing::uniform(-1, 1), gt::testing::uniform(-1, 1));
  for (double k : {-2.0, 0.0, 0.7, kPi}) {
    Complex dft = 0.0;
    for (int i = 0; i < 16; ++i) dft += v(i) * std::exp(-kI * k * double(i));
    CHECK(std::abs(z_transform(v, {std::exp(kI * k)}, 0)[0] - dft) < 1e-13);
  }
}

TEST_CASE("moving the origin to the left end multiplies by beta^{x_h}") {
  const auto p = point(4, 2);
  CVector psi(p.sites());
  for (int i = 0; i < p.sites(); ++i) psi(i) = Complex(gt::testing::uniform(-1, 1), gt::testing::uniform(-1, 1));
  const std::vector<Complex> betas{Complex(0.6, 0.3), Complex(-0.8, 0.1)};
  const CMatrix mid = z_transform_lattice(psi, betas);
  const CMatrix end = z_transform_lattice(psi, betas, 0);
  const int half = p.n_cells / 2;
  for (int b = 0; b < 2; ++b)
    for (int s = 0; s < 4; ++s)
      CHECK(std::abs(end(s, b) - std::pow(betas[b], -half) * mid(s, b)) < 1e-12 * std::abs(end(s, b)));
}

TEST_CASE("every beta is excited at t = 0") {
  const auto p = point(4, 2);
  const auto curve = compute_gbz(p, p.n_cells);
  const auto w = nonbloch_weights(evolve(p, delta_state(p.n_cells), {0.0}), curve);
  CHECK(w.axis == WeightAxis::gbz_beta);
  CHECK(w.columns() == 2 * static_cast<int>(curve.points.size()));
  double lo = 1e300, mean = 0.0;
  int n = 0;
  for (int c = 0; c < w.columns(); ++c) {
    if (w.coordinates[c].flagged) continue;
    lo = std::min(lo, std::abs(w.weights(0, c)));
    mean += std::abs(w.weights(0, c));
    ++n;
  }
  mean /= n;
  CHECK(n == w.columns());
  CHECK(lo > 0.4 * mean);
}

TEST_CASE("non-bloch branches carry opposite energies") {
  const auto p = point(4, 2);
  const auto curve = compute_gbz(p, p.n_cells);
  const auto w = nonbloch_weights(evolve(p, delta_state(p.n_cells), {0.0}), curve);
  for (int c = 0; c + 1 < w.columns(); c += 2) {
    CHECK(w.coordinates[c].branch == 0);
    CHECK(w.coordinates[c + 1].branch == 1);
    CHECK(std::abs(w.coordinates[c].energy + w.coordinates[c + 1].energy) < 1e-8);
    CHECK(w.coordinates[c].energy.real() <= w.coordinates[c + 1].energy.real());
  }
}

TEST_CASE("late-time dominant beta lies on the skin side of the unit circle") {
  for (auto p : {point(4, 2), point(2, 9), point(2, 0.5), point(2, 4)}) {
    const auto curve = compute_gbz(p, p.n_cells);
    const auto w = nonbloch_weights(evolve(p, delta_state(p.n_cells), {0.0, 50.0}), curve);
    int arg = 0;
    for (int c = 1; c < w.columns(); ++c)
      if (std::abs(w.weights(1, c)) > std::abs(w.weights(1, arg))) arg = c;
    CHECK((std::abs(w.coordinates[arg].beta) < 1.0) == (nhse_direction(curve) == Direction::left));
  }
}

TEST_CASE("every momentum is excited at t = 0") {
  const auto p = point(4, 2);
  const auto w = bz_fourier_weights(evolve(p, delta_state(p.n_cells), {0.0}), bands_on_grid(p, grid_k(160)));
  CHECK(w.axis == WeightAxis::bz_k);
  CHECK(w.columns() == 4 * 160);
  CHECK(std::abs(w.weights.row(0).norm() - 1.0) < 1e-12);
  for (int b = 0; b < 4; ++b) {
    double lo = 1e300, hi = 0.0;
    for (int c = 0; c < w.columns(); ++c)
      if (w.coordinates[c].band == b) {
        lo = std::min(lo, std::abs(w.weights(0, c)));
        hi = std::max(hi, std::abs(w.weights(0, c)));
      }
    // outer bands are flat to 10%; the inner pair varies by about 25%
    CHECK((hi - lo) / hi < (b == 0 || b == 3 ? 0.1 : 0.3));
  }
}

TEST_CASE("hermitian fourier weights are constant until the front reaches the ends") {
  const auto p = point(2.5, 2.5);
  const auto g = evolve(p, delta_state(p.n_cells), {0.0, 2.0, 5.0});
  const auto w = bz_fourier_weights(g, bands_on_grid(p, grid_k(40)));
  for (int r = 1; r < 3; ++r)
    CHECK((w.weights.row(r).cwiseAbs() - w.weights.row(0).cwiseAbs()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fourier weights follow the bloch growth factors") {
  // before the front reaches the ends |K_n(k, t)| is |c_n(k)| e^{Im E_n(k) t}
  const auto p = point(4, 2);
  const double t = 6.0;
  const auto ks = grid_k(160);
  const auto bands = bands_on_grid(p, ks);
  const auto w = bz_fourier_weights(evolve(p, delta_state(p.n_cells), {0.0, t}), bands);
  for (int b = 0; b < 4; ++b) {
    int got = -1, want = -1;
    double got_v = -1, want_v = -1;
    for (int c = 0; c < w.columns(); ++c) {
      if (w.coordinates[c].band != b) continue;
      const int ik = c % static_cast<int>(ks.size());
      const double pred = std::abs(bands.left[ik](b, 0)) * std::exp(bands.energies(b, ik).imag() * t);
      if (std::abs(w.weights(1, c)) > got_v) got_v = std::abs(w.weights(1, got = c));
      if (pred > want_v) want_v = pred, want = c;
    }
    CHECK(std::abs(w.coordinates[got].k - w.coordinates[want].k) < 1e-12);
  }
}

TEST_CASE("group velocity symmetry") {
  const auto p = point(4, 2);
  const auto bands = pbc_bands(p, 161);
  const RMatrix v = group_velocity(bands);
  const int n = static_cast<int>(bands.k.size()), mid = n / 2;
  CHECK(std::abs(bands.k[mid]) < 1e-14);
  for (int i = 0; i < n; ++i) {
    for (int b : {0, 3}) {
      // outer bands: Re E even in k, velocity odd
      CHECK(std::abs(bands.energies(b, i).real() - bands.energies(b, n - 1 - i).real()) < 1e-8);
      CHECK(std::abs(v(b, i) + v(b, n - 1 - i)) < 1e-8);
    }
    for (int b : {1, 2}) {
      // inner bands cross at k = 0: Re E odd, velocity even
      CHECK(std::abs(bands.energies(b, i).real() + bands.energies(b, n - 1 - i).real()) < 1e-8);
      CHECK(std::abs(v(b, i) - v(b, n - 1 - i)) < 1e-8);
    }
  }
  const double dk = bands.k[1] - bands.k[0];
  for (int b : {0, 3}) {
    CHECK(std::abs(v(b, mid)) < dk);
    CHECK(std::abs(bands.energies(b, mid).imag()) < 1e-10);
  }
}
