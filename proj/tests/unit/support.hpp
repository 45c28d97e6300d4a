#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include <glidetime/lattice.hpp>

namespace gt::testing {

inline ModelParams point(double t3, double t4, int n_cells = 40) {
  ModelParams p;
  p.t3 = t3;
  p.t4 = t4;
  p.n_cells = n_cells;
  return p;
}

// Largest distance of a greedy nearest-neighbour matching between two
// multisets of equal size.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (const Complex& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

inline std::vector<Complex> to_list(const CVector& v) {
  return std::vector<Complex>(v.data(), v.data() + v.size());
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace gt::testing
