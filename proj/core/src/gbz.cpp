#include "glidetime/gbz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "glidetime/error.hpp"

namespace gt {

BivariatePolynomial characteristic_polynomial(const ModelParams& params) {
  params.validate();
  const double e_scale =
      std::max(1.0, std::abs(params.t1) + std::abs(params.t2) +
                        std::max(std::abs(params.t3), std::abs(params.t4)));
  auto f = [&](Complex beta, Complex e) {
    const Matrix4c h = build_non_bloch(params, beta).entries - e * Matrix4c::Identity();
    return h.determinant() * std::pow(beta, kClearingPower);
  };
  return BivariatePolynomial::fit(f, kBetaDegree, 4, 1.0, e_scale);
}

BetaRoots characteristic_beta_roots(const BivariatePolynomial& poly, Complex energy) {
  auto c = poly.in_x(energy);
  if (static_cast<int>(c.size()) != kBetaDegree + 1)
    throw InvalidArgument("characteristic polynomial has the wrong degree");
  double cmax = 0.0;
  for (const auto& v : c) cmax = std::max(cmax, std::abs(v));
  BetaRoots out;
  while (c.size() > 1 && std::abs(c.back()) <= 1e-12 * cmax) {
    c.pop_back();
    out.degree_collapse = true;
  }
  out.roots = polynomial_roots(c);
  std::sort(out.roots.begin(), out.roots.end(),
            [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  return out;
}

BetaRoots characteristic_beta_roots(const ModelParams& params, Complex energy) {
  return characteristic_beta_roots(characteristic_polynomial(params), energy);
}

double GBZCurve::max_modulus() const {
  double m = 0.0;
  for (const auto& p : points)
    if (!p.flagged) m = std::max(m, std::abs(p.beta));
  return m;
}

double GBZCurve::min_modulus() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : points)
    if (!p.flagged) m = std::min(m, std::abs(p.beta));
  return m;
}

int GBZCurve::flagged_count() const {
  return static_cast<int>(
      std::count_if(points.begin(), points.end(), [](const GBZPoint& p) { return p.flagged; }));
}

double gbz_split_tolerance(int n_cells) { return 1e-3 * 40.0 / n_cells; }

namespace {

// log|beta| - log|partner| for the root of P(., E) at beta, where the partner
// is the other member of the middle pair; NaN when beta is not in that pair.
double middle_pair_gap(const BivariatePolynomial& poly, Complex beta, Complex e) {
  const auto r = characteristic_beta_roots(poly, e);
  if (r.degree_collapse || r.roots.size() != 4) return std::numeric_limits<double>::quiet_NaN();
  int idx = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(r.roots[i] - beta) < std::abs(r.roots[idx] - beta)) idx = i;
  if (idx != 1 && idx != 2) return std::numeric_limits<double>::quiet_NaN();
  return std::log(std::abs(beta)) - std::log(std::abs(r.roots[3 - idx]));
}

std::array<Complex, 4> eig4(const ModelParams& params, Complex beta) {
  Eigen::ComplexEigenSolver<Matrix4c> es(build_non_bloch(params, beta).entries, false);
  std::array<Complex, 4> e;
  for (int i = 0; i < 4; ++i) e[i] = es.eigenvalues()(i);
  return e;
}

// reorder `cur` to follow `prev` (minimal total distance)
std::array<Complex, 4> follow(const std::array<Complex, 4>& prev, std::array<Complex, 4> cur) {
  std::array<int, 4> p{0, 1, 2, 3}, best = p;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < 4; ++i) cost += std::abs(prev[i] - cur[p[i]]);
    if (cost < best_cost) {
      best_cost = cost;
      best = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  std::array<Complex, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = cur[best[i]];
  return out;
}

Complex nearest(const std::array<Complex, 4>& e, Complex target) {
  Complex best = e[0];
  for (const auto& v : e)
    if (std::abs(v - target) < std::abs(best - target)) best = v;
  return best;
}

struct Refined {
  Complex beta, partner, energy;
  bool ok = false;
};

Refined refine_pair(const BivariatePolynomial& poly, Complex lo, Complex hi, Complex e) {
  const Complex rot = std::polar(1.0, std::arg(hi / lo));
  Complex b = std::sqrt(std::abs(lo) * std::abs(hi)) * lo / std::abs(lo);
  Refined out;
  for (int it = 0; it < 50; ++it) {
    const Complex b2 = b * rot;
    const Complex f1 = poly(b, e), f2 = poly(b2, e);
    const Complex a11 = poly.dx(b, e), a12 = poly.dy(b, e);
    const Complex a21 = rot * poly.dx(b2, e), a22 = poly.dy(b2, e);
    const Complex det = a11 * a22 - a12 * a21;
    if (std::abs(det) == 0.0) return out;
    const Complex db = (f1 * a22 - f2 * a12) / det;
    const Complex de = (a11 * f2 - a21 * f1) / det;
    b -= db;
    e -= de;
    if (!std::isfinite(std::abs(b)) || !std::isfinite(std::abs(e))) return out;
    if (std::abs(db) < 1e-14 * std::abs(b) && std::abs(de) < 1e-14 * (1.0 + std::abs(e))) break;
  }
  const auto r = characteristic_beta_roots(poly, e);
  if (r.degree_collapse || r.roots.size() != 4) return out;
  const double scale = std::abs(b);
  const double d1 = std::min(std::abs(r.roots[1] - b), std::abs(r.roots[2] - b));
  const double d2 = std::min(std::abs(r.roots[1] - b * rot), std::abs(r.roots[2] - b * rot));
  out.beta = b;
  out.partner = b * rot;
  out.energy = e;
  out.ok = d1 < 1e-8 * scale && d2 < 1e-8 * scale;
  return out;
}

}  // namespace

int raw_split_count(const GBZCurve& curve) {
  return static_cast<int>(std::count_if(curve.points.begin(), curve.points.end(),
                                        [&](const GBZPoint& p) { return p.split > curve.tolerance; }));
}

std::vector<SelfIntersection> negative_axis_intersections(const ModelParams& params, double r_min,
                                                          double r_max) {
  if (!(r_min > 0 && r_max > r_min)) throw InvalidArgument("need 0 < r_min < r_max");
  const auto poly = characteristic_polynomial(params);
  constexpr int kSteps = 600;
  std::vector<double> rs(kSteps + 1);
  for (int i = 0; i <= kSteps; ++i)
    rs[i] = r_min * std::pow(r_max / r_min, double(i) / kSteps);

  struct Crossing {
    double r;
    Complex e;
  };
  std::vector<Crossing> found;
  std::array<Complex, 4> prev_e = eig4(params, -rs[0]);
  std::array<double, 4> prev_h;
  for (int b = 0; b < 4; ++b) prev_h[b] = middle_pair_gap(poly, -rs[0], prev_e[b]);

  for (int i = 1; i <= kSteps; ++i) {
    const auto cur_e = follow(prev_e, eig4(params, -rs[i]));
    std::array<double, 4> cur_h;
    for (int b = 0; b < 4; ++b) {
      cur_h[b] = middle_pair_gap(poly, -rs[i], cur_e[b]);
      if (!(std::isfinite(prev_h[b]) && std::isfinite(cur_h[b]))) continue;
      if ((prev_h[b] < 0) == (cur_h[b] < 0)) continue;
      double lo = rs[i - 1], hi = rs[i], h_lo = prev_h[b];
      Complex e_lo = prev_e[b], e = cur_e[b];
      for (int it = 0; it < 80 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        e = nearest(eig4(params, -mid), e_lo);
        const double h = middle_pair_gap(poly, -mid, e);
        if (!std::isfinite(h)) break;
        if ((h < 0) == (h_lo < 0)) {
          lo = mid;
          h_lo = h;
          e_lo = e;
        } else {
          hi = mid;
        }
      }
      found.push_back({0.5 * (lo + hi), e});
    }
    prev_e = cur_e;
    prev_h = cur_h;
  }

  std::vector<SelfIntersection> out;
  for (const auto& c : found) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SelfIntersection& s) {
      return std::abs(s.beta + c.r) < 1e-6 * c.r;
    });
    if (it == out.end()) {
      out.push_back({Complex(-c.r, 0.0), {}});
      it = out.end() - 1;
    }
    const bool dup = std::any_of(it->energies.begin(), it->energies.end(),
                                 [&](Complex e) { return std::abs(e - c.e) < 1e-6; });
    if (!dup) it->energies.push_back(c.e);
  }
  return out;
}

GBZCurve compute_gbz(const ModelParams& params, int n_cells, Precision precision) {
  if (n_cells < 20) throw InvalidArgument("compute_gbz needs n_cells >= 20");
  const ModelParams p = params.with_cells(n_cells);
  p.validate();
  const auto obc = obc_analysis(p, precision);
  const auto poly = characteristic_polynomial(p);

  GBZCurve curve;
  curve.params = p;
  curve.tolerance = gbz_split_tolerance(n_cells);
  for (Eigen::Index j = 0; j < obc.eigensystem.size(); ++j) {
    if (obc.classification.kind[j] == ModeKind::edge) {
      curve.excluded_modes.push_back(static_cast<int>(j));
      continue;
    }
    const Complex e = obc.eigensystem.eigenvalues(j);
    const auto roots = characteristic_beta_roots(poly, e);
    if (roots.degree_collapse || roots.roots.size() != 4) {
      curve.points.push_back({Complex(0), Complex(0), e, e, static_cast<int>(j), 0, 0.0, true});
      continue;
    }
    const Complex lo = roots.roots[1], hi = roots.roots[2];
    const double split = std::abs(hi) / std::abs(lo) - 1.0;
    const auto ref = split < 1e-10 ? Refined{lo, hi, e, true} : refine_pair(poly, lo, hi, e);
    if (!ref.ok) {
      curve.points.push_back({lo, lo, e, e, static_cast<int>(j), 0, split, true});
      curve.points.push_back({hi, hi, e, e, static_cast<int>(j), 1, split, true});
      continue;
    }
    curve.points.push_back({ref.beta, lo, ref.energy, e, static_cast<int>(j), 0, split, false});
    curve.points.push_back({ref.partner, hi, ref.energy, e, static_cast<int>(j), 1, split, false});
  }
  std::stable_sort(curve.points.begin(), curve.points.end(), [](const GBZPoint& a, const GBZPoint& b) {
    return std::arg(a.beta) < std::arg(b.beta);
  });

  if (!p.hermitian() && static_cast<int>(curve.points.size()) > curve.flagged_count()) {
    curve.self_intersections =
        negative_axis_intersections(p, 0.5 * curve.min_modulus(), 2.0 * curve.max_modulus());
  }
  return curve;
}

Direction nhse_direction(const GBZCurve& curve, double tol) {
  if (curve.points.empty()) throw InvalidArgument("empty GBZ curve");
  const double lo = curve.min_modulus(), hi = curve.max_modulus();
  if (!std::isfinite(lo)) throw InvalidArgument("GBZ curve has no unflagged points");
  if (hi < 1.0 - tol) return Direction::left;
  if (lo > 1.0 + tol) return Direction::right;
  if (hi <= 1.0 + tol && lo >= 1.0 - tol) return Direction::none;
  throw UnsupportedBipolar("GBZ straddles the unit circle (bipolar skin effect)");
}

int gbz_winding_around(const GBZCurve& curve, Complex z) {
  std::vector<Complex> pts;
  for (const auto& p : curve.points)
    if (!p.flagged) pts.push_back(p.beta);
  if (pts.size() < 3) return 0;
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Complex a = pts[i] - z, b = pts[(i + 1) % pts.size()] - z;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

}  // namespace gt
