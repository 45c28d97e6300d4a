#include <doctest.h>

#include <algorithm>
#include <unsupported/Eigen/MatrixFunctions>

#include <glidetime/dynamics.hpp>
#include <glidetime/error.hpp>
#include <glidetime/gbz.hpp>

#include "support.hpp"

using namespace gt;
using gt::testing::point;

TEST_CASE("delta state") {
  const CVector v = delta_state(40);
  CHECK(v.size() == 160);
  CHECK(v(80) == Complex(1.0));
  CHECK(v.norm() == 1.0);
  CHECK(v.cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(delta_state(40, 160), InvalidArgument);
  CHECK_THROWS_AS(delta_state(40, -1), InvalidArgument);
}

TEST_CASE("delta state has a flat spectrum") {
  const CVector v = delta_state(40);
  for (int m = 0; m < 40; ++m) {
    const double k = 2.0 * kPi * m / 40;
    Complex amp = 0.0;
    for (int c = 0; c < 40; ++c) amp += v(4 * c) * std::exp(-kI * k * double(c));
    CHECK(std::abs(amp) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("evolution starts from the initial state") {
  const auto p = point(4, 2);
  const CVector psi0 = delta_state(p.n_cells);
  for (auto method : {Propagation::spectral, Propagation::stepped}) {
    EvolveOptions o;
    o.method = method;
    const auto g = evolve(p, psi0, {0.0, 1.0}, o);
    CHECK((g.psi.row(0).transpose() - psi0).norm() == 0.0);
  }
  CHECK_THROWS_AS(evolve(p, psi0, {0.5, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(evolve(p, psi0, {0.0, 2.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(evolve(p, CVector::Zero(7), {0.0}), InvalidArgument);
}

TEST_CASE("hermitian evolution is unitary") {
  const auto p = point(2.5, 2.5);
  const auto g = evolve(p, delta_state(p.n_cells), uniform_times(50, 101));
  for (double n : norm_trace(g)) CHECK(std::abs(n - 1.0) < 1e-8);
}

TEST_CASE("spectral and stepped propagation agree") {
  const auto p = point(4, 2);
  const CVector psi0 = delta_state(p.n_cells);
  EvolveOptions spectral;
  spectral.precision = Precision::extended;
  EvolveOptions stepped;
  stepped.method = Propagation::stepped;
  EvolveOptions halved = stepped;
  halved.step_norm = 0.25;
  const auto a = evolve(p, psi0, {0.0, 10.0}, spectral);
  const auto b = evolve(p, psi0, {0.0, 10.0}, stepped);
  const auto c = evolve(p, psi0, {0.0, 10.0}, halved);
  CHECK((b.psi.row(1) - c.psi.row(1)).norm() / c.psi.row(1).norm() < 1e-10);
  CHECK((a.psi.row(1) - c.psi.row(1)).norm() / c.psi.row(1).norm() < 1e-6);
}

TEST_CASE("evolution is linear and composes") {
  const auto p = point(4, 2, 20);
  const CVector psi0 = delta_state(p.n_cells);
  EvolveOptions o;
  o.precision = Precision::extended;
  const Complex alpha(0.3, -1.7);
  const auto a = evolve(p, psi0, {0.0, 3.0, 7.0}, o);
  const auto b = evolve(p, CVector(alpha * psi0), {0.0, 3.0, 7.0}, o);
  CHECK((alpha * a.psi - b.psi).norm() < 1e-12 * b.psi.norm());
  const CVector mid = a.psi.row(1).transpose() * std::exp(a.log_scale[1]);
  const auto c = evolve(p, mid, {0.0, 4.0}, o);
  const CVector end = c.psi.row(1).transpose() * std::exp(c.log_scale[1]);
  const CVector want = a.psi.row(2).transpose() * std::exp(a.log_scale[2]);
  CHECK((end - want).norm() < 1e-8 * want.norm());
}

TEST_CASE("per-instant grids have unit rows") {
  EvolveOptions o;
  o.normalization = Normalization::per_instant;
  const auto g = evolve(point(2, 9), delta_state(40), uniform_times(60, 31), o);
  for (int r = 0; r < g.rows(); ++r) CHECK(std::abs(g.psi.row(r).norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(norm_trace(g), InvalidArgument);
  const auto raw = evolve(point(2, 9), delta_state(40), uniform_times(60, 31));
  const auto n = normalized(raw);
  for (int r = 0; r < n.rows(); ++r) CHECK(std::abs(n.psi.row(r).norm() - 1.0) < 1e-12);
}

TEST_CASE("large growth is stored rescaled") {
  const auto p = point(2, 9);
  const auto g = evolve(p, delta_state(p.n_cells), {0.0, 100.0, 400.0});
  const auto logs = log_norm_trace(g);
  CHECK(std::isfinite(logs.back()));
  CHECK(logs.back() > 2.0 * std::log(1e100));
  CHECK(g.log_scale.back() > 0.0);
}

TEST_CASE("amplification identity on the open chain") {
  const auto p = point(4, 2);
  const auto es = obc_eigensystem(p, Precision::extended);
  const auto g = evolve(p, es, delta_state(p.n_cells), uniform_times(20, 41));
  CHECK(amplification_identity_residual(g, es) < 1e-6);
}

TEST_CASE("amplification identity in the hermitian case") {
  const auto p = point(2.5, 2.5);
  const auto es = obc_eigensystem(p);
  const auto g = evolve(p, es, delta_state(p.n_cells), uniform_times(20, 21));
  CHECK(amplification_identity_residual(g, es) < 1e-8);
  for (double v : diagonal_amplification_log(g, es)) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("amplification identity against a brute-force exponential") {
  for (int s = 0; s < 5; ++s) {
    RMatrix m(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) m(i, j) = gt::testing::uniform(-1, 1);
    const auto es = biorthogonal_eigensystem(m);
    EvolutionGrid g;
    g.times = uniform_times(3.0, 13);
    g.psi.resize(g.rows(), 8);
    g.log_scale.assign(g.rows(), 0.0);
    CVector psi0 = CVector::Zero(8);
    psi0(2) = 1.0;
    const CMatrix mc = m.cast<Complex>();
    for (int r = 0; r < g.rows(); ++r)
      g.psi.row(r) = (CMatrix(-kI * g.times[r] * mc).exp() * psi0).transpose();
    CHECK(amplification_identity_residual(g, es) < 1e-8);
  }
}

TEST_CASE("diagonal-only sum misses the mode overlaps") {
  const auto p = point(4, 2);
  const auto es = obc_eigensystem(p, Precision::extended);
  const auto g = evolve(p, es, delta_state(p.n_cells), uniform_times(20, 21));
  const auto exact = log_norm_trace(g);
  const auto diag = diagonal_amplification_log(g, es);
  double gap = 0.0;
  for (std::size_t r = 0; r < exact.size(); ++r) gap = std::max(gap, std::abs(exact[r] - diag[r]));
  CHECK(gap > 1e-3);
}

TEST_CASE("late-time growth follows the zero-drift exponent") {
  const auto p = point(4, 2);
  EvolveOptions o;
  o.precision = Precision::extended;
  const auto g = evolve(p, delta_state(p.n_cells), {0.0, 150.0, 300.0}, o);
  const auto logs = log_norm_trace(g);
  const double rate = (logs[2] - logs[1]) / 150.0;
  CHECK(rate == doctest::Approx(2.0 * lyapunov_zero_drift(p)).epsilon(0.05));
}

TEST_CASE("skin drift reaches the boundary") {
  EvolveOptions o;
  o.normalization = Normalization::per_instant;
  const auto a = point(4, 2), b = point(2, 9);
  const auto ga = evolve(a, delta_state(a.n_cells), uniform_times(default_horizon(a), 101), o);
  const auto gb = evolve(b, delta_state(b.n_cells), uniform_times(default_horizon(b), 101), o);
  CHECK(boundary_weight(ga, 0.1).left.back() > 0.9);
  CHECK(boundary_weight(gb, 0.1).right.back() > 0.9);
  CHECK_THROWS_AS(boundary_weight(ga, 0.5), InvalidArgument);
}

TEST_CASE("hermitian centre of mass stays in the middle") {
  EvolveOptions o;
  o.normalization = Normalization::per_instant;
  const auto p = point(2.5, 2.5);
  const int n = p.n_cells;
  // a_m <-> c_{N-1-m} is a mirror of the hermitian chain
  CVector sym = CVector::Zero(p.sites());
  sym(site_index(n / 2, Sublattice::a)) = 1.0;
  sym(site_index(n - 1 - n / 2, Sublattice::c)) = 1.0;
  const auto g = evolve(p, sym.normalized(), uniform_times(20, 41), o);
  for (double x : com_trajectory(g)) CHECK(std::abs(x - 79.5) < 1.0);
  // a lone delta has no mirror partner and only stays within a cell
  const auto d = evolve(p, delta_state(n), uniform_times(20, 41), o);
  for (double x : com_trajectory(d)) CHECK(std::abs(x - 79.5) < 4.0);
}

TEST_CASE("late-time weight drifts with the non-reciprocity") {
  EvolveOptions o;
  o.normalization = Normalization::per_instant;
  for (int s = 0; s < 20; ++s) {
    double hi = gt::testing::uniform(0.5, 10), lo = gt::testing::uniform(0.2, 10);
    if (hi < lo) std::swap(hi, lo);
    if (hi - lo < 0.5) hi = lo + 0.5;
    const auto p = point(hi, lo);
    const auto g = evolve(p, delta_state(p.n_cells), {0.0, default_horizon(p)}, o);
    const auto w = boundary_weight(g, 0.1);
    CAPTURE(hi);
    CAPTURE(lo);
    CHECK(w.left.back() > w.right.back());
    const auto gm = evolve(p.mirrored(), delta_state(p.n_cells), {0.0, default_horizon(p)}, o);
    const auto wm = boundary_weight(gm, 0.1);
    CHECK(wm.right.back() > wm.left.back());
  }
}

TEST_CASE("beating at (4,2) and none at (2,9)") {
  EvolveOptions o;
  o.normalization = Normalization::per_instant;
  double amp[2];
  int i = 0;
  for (auto p : {point(4, 2), point(2, 9)}) {
    const double h = default_horizon(p);
    amp[i++] = beating_amplitude(evolve(p, delta_state(p.n_cells), uniform_times(h, 401), o), 0.5 * h);
  }
  CHECK(amp[0] > 5.0 * amp[1]);
}

TEST_CASE("time grids") {
  const auto u = uniform_times(10, 11);
  CHECK(u.front() == 0.0);
  CHECK(u.back() == 10.0);
  const auto l = log_times(60, 200);
  CHECK(l.size() == 200);
  CHECK(l[0] == 0.0);
  CHECK(l[1] == doctest::Approx(0.06));
  CHECK(l.back() == doctest::Approx(60.0));
  CHECK(std::is_sorted(l.begin(), l.end()));
}

TEST_CASE("group speed and horizon") {
  const auto p = point(2.5, 2.5);
  CHECK(max_group_speed(p) > 0.0);
  CHECK(default_horizon(p) == doctest::Approx(3.0 * transit_estimate(p)));
}
