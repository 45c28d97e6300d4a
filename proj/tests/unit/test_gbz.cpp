#include <doctest.h>

#include <algorithm>
#include <map>

#include <glidetime/dynamics.hpp>
#include <glidetime/error.hpp>
#include <glidetime/gbz.hpp>

#include "support.hpp"

using namespace gt;
using gt::testing::point;

namespace {

const GBZCurve& curve_at(double t3, double t4) {
  static std::map<std::pair<double, double>, GBZCurve> cache;
  auto key = std::make_pair(t3, t4);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_gbz(point(t3, t4), 40)).first;
  return it->second;
}

}  // namespace

TEST_CASE("gbz magnitudes follow the skin direction") {
  CHECK(curve_at(2, 0.5).max_modulus() < 1.0);
  CHECK(curve_at(5, 4).max_modulus() < 1.0);
  CHECK(curve_at(2, 4).min_modulus() > 1.0);
  const auto& h = curve_at(2.5, 2.5);
  for (const auto& pt : h.points) CHECK(std::abs(std::abs(pt.beta) - 1.0) < 1e-6);
  CHECK_THROWS_AS(compute_gbz(point(2, 0.5), 10), InvalidArgument);
}

TEST_CASE("gbz points satisfy the characteristic equation") {
  for (auto [t3, t4] : {std::pair{2.0, 0.5}, {2.0, 4.0}, {4.0, 2.0}}) {
    const auto& c = curve_at(t3, t4);
    const auto poly = characteristic_polynomial(c.params);
    CHECK(c.flagged_count() == 0);
    for (const auto& pt : c.points) CHECK(std::abs(poly(pt.beta, pt.energy)) < 1e-8);
  }
}

TEST_CASE("gbz points reproduce their open-chain energies") {
  const auto& c = curve_at(2, 0.5);
  for (const auto& pt : c.points) {
    Eigen::ComplexEigenSolver<Matrix4c> raw(build_non_bloch(c.params, pt.raw_beta).entries, false);
    Eigen::ComplexEigenSolver<Matrix4c> ref(build_non_bloch(c.params, pt.beta).entries, false);
    double d_raw = 1e300, d_ref = 1e300;
    for (int i = 0; i < 4; ++i) {
      d_raw = std::min(d_raw, std::abs(raw.eigenvalues()(i) - pt.obc_energy));
      d_ref = std::min(d_ref, std::abs(ref.eigenvalues()(i) - pt.energy));
    }
    CHECK(d_raw < 1e-6);
    CHECK(d_ref < 1e-6);
    // only the refined energy and its chiral partner belong to the point
    int matched = 0;
    for (int i = 0; i < 4; ++i) {
      const Complex e = ref.eigenvalues()(i);
      if (std::min(std::abs(e - pt.energy), std::abs(e + pt.energy)) < 1e-6) ++matched;
    }
    CHECK(matched == 2);
  }
}

TEST_CASE("refined pairs sit on the equal-modulus locus") {
  const auto& c = curve_at(2, 0.5);
  const auto poly = characteristic_polynomial(c.params);
  for (const auto& pt : c.points) {
    const auto r = characteristic_beta_roots(poly, pt.energy).roots;
    CHECK(std::abs(std::abs(r[2]) / std::abs(r[1]) - 1.0) < 1e-10);
    if (std::abs(pt.obc_energy.imag()) < 1e-8) CHECK(pt.split < 1e-3);
  }
}

TEST_CASE("gbz is ordered by argument") {
  const auto& c = curve_at(4, 2);
  for (std::size_t i = 0; i + 1 < c.points.size(); ++i)
    CHECK(std::arg(c.points[i].beta) <= std::arg(c.points[i + 1].beta));
}

TEST_CASE("gbz self-intersection on the negative real axis") {
  for (auto [t3, t4] : {std::pair{2.0, 0.5}, {2.0, 4.0}, {5.0, 4.0}}) {
    const auto& c = curve_at(t3, t4);
    REQUIRE_FALSE(c.self_intersections.empty());
    for (const auto& s : c.self_intersections) {
      CHECK(s.beta.real() < 0.0);
      CHECK(std::abs(s.beta.imag()) < 1e-4);
      CHECK(s.energies.size() >= 2);
    }
  }
}

TEST_CASE("random non-hermitian points have a negative-axis crossing") {
  for (int s = 0; s < 8; ++s) {
    double t3 = gt::testing::uniform(0.2, 8), t4 = gt::testing::uniform(0.2, 8);
    if (std::abs(t3 - t4) < 0.3) t4 += 0.6;
    const auto c = compute_gbz(point(t3, t4), 30);
    CAPTURE(t3);
    CAPTURE(t4);
    CHECK_FALSE(c.self_intersections.empty());
  }
}

TEST_CASE("skin direction") {
  CHECK(nhse_direction(curve_at(5, 4)) == Direction::left);
  CHECK(nhse_direction(curve_at(2, 4)) == Direction::right);
  CHECK(nhse_direction(curve_at(2.5, 2.5)) == Direction::none);
  GBZCurve mixed;
  mixed.points.push_back({Complex(0.5), {}, {}, {}, 0, 0, 0.0, false});
  mixed.points.push_back({Complex(2.0), {}, {}, {}, 1, 0, 0.0, false});
  CHECK_THROWS_AS(nhse_direction(mixed), UnsupportedBipolar);
}

TEST_CASE("skin direction agrees with the energy winding") {
  for (auto [t3, t4] : {std::pair{2.0, 0.5}, {2.0, 4.0}, {5.0, 4.0}, {4.0, 2.0}, {2.0, 9.0}}) {
    const auto p = point(t3, t4);
    const auto [neg, pos] = pbc_loop_centroids(p);
    const auto dir = nhse_direction(curve_at(t3, t4));
    CHECK((dir == Direction::left) == (energy_winding(p, neg) == -1));
  }
}

TEST_CASE("decay of open-chain eigenvectors matches the gbz modulus") {
  const auto p = point(2, 0.5);
  const auto es = obc_eigensystem(p, Precision::extended);
  const auto poly = characteristic_polynomial(p);
  int tested = 0;
  for (Eigen::Index j = 0; j < es.size() && tested < 6; ++j) {
    const Complex e = es.eigenvalues(j);
    if (std::abs(e.imag()) > 1e-8 || std::abs(e) < 1e-6) continue;
    // least-squares slope of log max_s |psi(cell, s)| over the inner half
    std::vector<double> x, y;
    for (int c = p.n_cells / 4; c < 3 * p.n_cells / 4; ++c) {
      double m = 0.0;
      for (int s = 0; s < 4; ++s) m = std::max(m, std::abs(es.right(4 * c + s, j)));
      x.push_back(c);
      y.push_back(std::log(m));
    }
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const auto r = characteristic_beta_roots(poly, e).roots;
    CHECK(slope == doctest::Approx(std::log(std::abs(r[1]))).epsilon(0.05));
    ++tested;
  }
  CHECK(tested == 6);
}

TEST_CASE("saddle points are stationary") {
  for (auto p : {point(4, 2), point(10, 8), point(2.5, 2.5)}) {
    const auto s = saddle_points(p);
    REQUIRE_FALSE(s.points.empty());
    CHECK(s.diagnostic.empty());
    for (const auto& sp : s.points) {
      CHECK(sp.residual < 1e-8);
      CHECK(std::abs(sp.beta - std::exp(kI * sp.k_s)) < 1e-10 * std::abs(sp.beta));
    }
  }
}

TEST_CASE("hermitian saddles on the gbz are real and the exponent vanishes") {
  const auto p = point(2.5, 2.5);
  for (const auto& sp : saddle_points(p).points)
    if (sp.on_gbz) CHECK(std::abs(sp.energy.imag()) < 1e-10);
  CHECK(std::abs(lyapunov_zero_drift(p)) < 1e-10);
}

TEST_CASE("complex saddles on the gbz disappear across the symmetric boundary") {
  auto complex_on_gbz = [](const ModelParams& p) {
    const auto s = saddle_points(p);
    return std::count_if(s.points.begin(), s.points.end(), [](const SaddlePoint& sp) {
      return sp.on_gbz && std::abs(sp.energy.imag()) > 1e-6;
    });
  };
  CHECK(complex_on_gbz(point(10, 8)) == 0);
  CHECK(complex_on_gbz(point(10, 2.5)) > 0);
}

TEST_CASE("zero-drift exponent matches the late-time growth rate") {
  for (auto p : {point(4, 2), point(2, 9)}) {
    const double lambda = lyapunov_zero_drift(p);
    const auto fit = growth_rate_fit(p);
    CHECK(fit.rate == doctest::Approx(lambda).epsilon(0.05));
  }
}
