#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "glidetime/error.hpp"
#include "glidetime/gbz.hpp"

namespace gt {

SaddleSearch saddle_points(const ModelParams& params, const SaddleOptions& options) {
  params.validate();
  const auto poly = characteristic_polynomial(params);
  SaddleSearch out;

  struct Raw {
    Complex beta, e;
  };
  std::vector<Raw> sols;
  for (int a = 0; a < options.re_k_count; ++a) {
    const double kr = -kPi + 2.0 * kPi * a / options.re_k_count;
    for (int b = 0; b < options.im_k_count; ++b) {
      const double ki =
          -options.im_k_bound + 2.0 * options.im_k_bound * b / std::max(1, options.im_k_count - 1);
      const Complex beta0 = std::exp(kI * Complex(kr, ki));
      Eigen::ComplexEigenSolver<Matrix4c> es(build_non_bloch(params, beta0).entries, false);
      for (int s = 0; s < 4; ++s) {
        ++out.seeds;
        Complex beta = beta0, e = es.eigenvalues()(s);
        bool ok = false;
        for (int it = 0; it < options.max_iterations; ++it) {
          const Complex f0 = poly(beta, e), f1 = poly.dx(beta, e);
          Eigen::Matrix2cd jac;
          jac << f1, poly.dy(beta, e), poly.dxx(beta, e), poly.dxy(beta, e);
          const Eigen::Vector2cd rhs(-f0, -f1);
          const auto lu = jac.fullPivLu();
          if (!lu.isInvertible()) break;
          const Eigen::Vector2cd d = lu.solve(rhs);
          if (!d.allFinite()) break;
          beta += d(0);
          e += d(1);
          if (d.cwiseAbs().maxCoeff() < 1e-13 * (1.0 + std::abs(beta) + std::abs(e))) {
            ok = true;
            break;
          }
        }
        if (!ok || !(std::abs(beta) > 1e-8 && std::abs(beta) < 1e8)) continue;
        ++out.converged;
        // Newton stalls near sqrt(eps) when the saddle is also an E double
        // root; dE/dbeta = 0 there, so the eigenvalue of H(beta) is exact to
        // second order in the beta error.
        // Two bands crossing at (beta, E) also give a double root in beta;
        // those are not stationary points of a band and are dropped.
        {
          Eigen::ComplexEigenSolver<Matrix4c> snap(build_non_bloch(params, beta).entries, false);
          int best = 0;
          for (int i = 1; i < 4; ++i)
            if (std::abs(snap.eigenvalues()(i) - e) < std::abs(snap.eigenvalues()(best) - e)) best = i;
          bool crossing = false;
          for (int i = 0; i < 4; ++i)
            if (i != best && std::abs(snap.eigenvalues()(i) - snap.eigenvalues()(best)) < 1e-6 * (1.0 + std::abs(e)))
              crossing = true;
          if (crossing) continue;
          e = snap.eigenvalues()(best);
        }
        const bool dup = std::any_of(sols.begin(), sols.end(), [&](const Raw& r) {
          return std::abs(r.beta - beta) < options.merge_radius &&
                 std::abs(r.e - e) < options.merge_radius;
        });
        if (!dup) sols.push_back({beta, e});
      }
    }
  }

  for (const auto& s : sols) {
    SaddlePoint sp;
    sp.beta = s.beta;
    sp.energy = s.e;
    sp.k_s = -kI * std::log(s.beta);
    // dE/dk = -(dP/dbeta * i beta) / (dP/dE)
    const Complex pe = poly.dy(s.beta, s.e);
    sp.residual = pe == 0.0 ? std::numeric_limits<double>::infinity()
                            : std::abs(poly.dx(s.beta, s.e) * kI * s.beta / pe);

    const auto roots = characteristic_beta_roots(poly, s.e);
    if (roots.roots.size() == 4) {
      std::array<int, 4> idx{0, 1, 2, 3};
      std::sort(idx.begin(), idx.end(), [&](int x, int y) {
        return std::abs(roots.roots[x] - s.beta) < std::abs(roots.roots[y] - s.beta);
      });
      sp.on_gbz = std::min(idx[0], idx[1]) == 1 && std::max(idx[0], idx[1]) == 2;
    }

    Eigen::ComplexEigenSolver<Matrix4c> es(build_non_bloch(params, s.beta).entries, false);
    std::array<Complex, 4> ev;
    for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
      return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    for (int i = 0; i < 4; ++i)
      if (sp.band < 0 || std::abs(ev[i] - s.e) < std::abs(ev[sp.band] - s.e)) sp.band = i;
    out.points.push_back(sp);
  }
  if (out.points.empty()) out.diagnostic = "no Newton seed converged";
  return out;
}

double lyapunov_zero_drift(const ModelParams& params, const SaddleOptions& options) {
  const auto search = saddle_points(params, options);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& s : search.points)
    if (s.on_gbz) best = std::max(best, s.energy.imag());
  if (!std::isfinite(best))
    throw NumericalFailure("no saddle point on the GBZ (" + std::to_string(search.points.size()) +
                           " saddles, " + std::to_string(search.converged) + "/" +
                           std::to_string(search.seeds) + " seeds converged)");
  return best;
}

}  // namespace gt
