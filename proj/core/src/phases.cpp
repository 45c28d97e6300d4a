#include "glidetime/phases.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "glidetime/dynamics.hpp"
#include "glidetime/error.hpp"
#include "glidetime/gbz.hpp"

namespace gt {

const char* to_string(Topology t) {
  switch (t) {
    case Topology::nontrivial: return "nontrivial";
    case Topology::trivial: return "trivial";
    case Topology::gapless: return "gapless";
  }
  return "?";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::I_prime: return "I'";
    case Region::II: return "II";
    case Region::II_prime: return "II'";
    case Region::III: return "III";
    case Region::III_prime: return "III'";
    case Region::hermitian: return "Hermitian";
  }
  return "?";
}

const char* to_string(DynamicClass c) {
  switch (c) {
    case DynamicClass::hermitian: return "Hermitian";
    case DynamicClass::A: return "A";
    case DynamicClass::A_prime: return "A'";
    case DynamicClass::B: return "B";
    case DynamicClass::B_prime: return "B'";
    case DynamicClass::C: return "C";
    case DynamicClass::C_prime: return "C'";
  }
  return "?";
}

const char* to_string(Frequencies f) {
  switch (f) {
    case Frequencies::dual: return "dual";
    case Frequencies::single: return "single";
    case Frequencies::all_real: return "all_real";
  }
  return "?";
}

const char* to_string(LyapunovPath p) { return p == LyapunovPath::path1 ? "path1" : "path2"; }

EigenmodePhaseLabel eigenmode_phase(const ModelParams& params, int k_count) {
  params.validate();
  EigenmodePhaseLabel out;
  const auto zak = complex_zak_phase(params, k_count);
  out.zak_total = zak.total_occupied;
  out.line_gap = zak.line_gap;
  if (zak.gapless)
    out.topology = Topology::gapless;
  else
    out.topology = std::abs(zak.total_occupied - kPi) < std::abs(zak.total_occupied)
                       ? Topology::nontrivial
                       : Topology::trivial;

  if (params.hermitian()) {
    out.region = Region::hermitian;
    out.nhse = Direction::none;
    return out;
  }
  const auto [neg, pos] = pbc_loop_centroids(params);
  auto safe_winding = [&](Complex e) {
    try {
      return energy_winding(params, e);
    } catch (const InvalidArgument&) {
      return 0;
    }
  };
  // Thin or bent loops can leave the centroid outside; the loops are mirror
  // images under E -> conj(E), so an interior point sits on the real axis.
  const double reach = std::abs(params.t1) + std::abs(params.t2) + std::abs(params.t3) +
                       std::abs(params.t4);
  auto loop_winding = [&](Complex centroid, double side) {
    if (const int w = safe_winding(centroid); w != 0) return w;
    constexpr int samples = 96;
    for (int i = 1; i < samples; ++i)
      if (const int w = safe_winding(Complex(side * reach * i / samples, 0.0)); w != 0) return w;
    return 0;
  };
  out.winding_neg = loop_winding(neg, -1.0);
  out.winding_pos = loop_winding(pos, 1.0);
  const int w = out.winding_neg != 0 ? out.winding_neg : out.winding_pos;
  out.nhse = w < 0 ? Direction::left : (w > 0 ? Direction::right : Direction::none);

  const bool primed = out.nhse == Direction::right;
  switch (out.topology) {
    case Topology::nontrivial: out.region = primed ? Region::I_prime : Region::I; break;
    case Topology::gapless: out.region = primed ? Region::II_prime : Region::II; break;
    case Topology::trivial: out.region = primed ? Region::III_prime : Region::III; break;
  }
  return out;
}

DynamicPhaseLabel dynamic_phase(const ModelParams& params, const CVector& ev) {
  DynamicPhaseLabel out;
  out.spectral_radius = ev.cwiseAbs().maxCoeff();
  out.max_im = ev.imag().maxCoeff();
  const bool left = params.t3 > params.t4;
  out.direction = params.hermitian() ? Direction::none : (left ? Direction::left : Direction::right);
  if (params.hermitian()) {
    out.cls = DynamicClass::hermitian;
    out.freq = Frequencies::all_real;
    return out;
  }
  const double eps_real = 1e-8 * out.spectral_radius;
  if (ev.imag().cwiseAbs().maxCoeff() < eps_real) {
    out.cls = left ? DynamicClass::C : DynamicClass::C_prime;
    out.freq = Frequencies::all_real;
    return out;
  }
  const double eps_dom = 1e-3 * out.max_im;
  std::vector<double> re;
  for (Eigen::Index j = 0; j < ev.size(); ++j)
    if (ev(j).imag() >= out.max_im - eps_dom) re.push_back(std::abs(ev(j).real()));
  std::sort(re.begin(), re.end());
  std::vector<std::vector<double>> clusters{{re.front()}};
  for (std::size_t i = 1; i < re.size(); ++i) {
    if (re[i] - re[i - 1] > 10.0 * eps_dom) clusters.emplace_back();
    clusters.back().push_back(re[i]);
  }
  for (const auto& c : clusters) {
    double s = 0;
    for (double v : c) s += v;
    out.dominant_re.push_back(s / c.size());
  }
  if (clusters.size() >= 2)
    throw ClassificationAmbiguous("dominant modes form " + std::to_string(clusters.size()) +
                                  " frequency clusters");
  const bool zero = clusters.front().front() <= 10.0 * eps_dom;
  out.freq = zero ? Frequencies::single : Frequencies::dual;
  if (zero)
    out.cls = left ? DynamicClass::B : DynamicClass::B_prime;
  else
    out.cls = left ? DynamicClass::A : DynamicClass::A_prime;
  return out;
}

DynamicPhaseLabel dynamic_phase(const ModelParams& params, int n_cells) {
  if (n_cells < 40) throw InvalidArgument("dynamic_phase needs n_cells >= 40");
  const ModelParams p = params.with_cells(n_cells);
  p.validate();
  return dynamic_phase(p, obc_eigensystem(p).eigenvalues);
}

namespace {

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

PhaseCell classify_cell(DiagramKind kind, const ModelParams& p, const DiagramOptions& options) {
  PhaseCell cell;
  cell.t3 = p.t3;
  cell.t4 = p.t4;
  try {
    if (kind == DiagramKind::eigenmode) {
      const auto l = eigenmode_phase(p, options.k_count);
      cell.label = to_string(l.region);
      cell.topology = to_string(l.topology);
      cell.direction = l.nhse;
    } else {
      const auto l = dynamic_phase(p, p.n_cells);
      cell.label = to_string(l.cls);
      cell.freq = to_string(l.freq);
      cell.direction = l.direction;
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

PhaseGrid phase_diagram(DiagramKind kind, Range t3_range, Range t4_range, int resolution,
                        const ModelParams& base, const DiagramOptions& options) {
  if (resolution < 16) throw InvalidArgument("resolution must be >= 16");
  base.validate();
  PhaseGrid g;
  g.kind = kind;
  for (int i = 0; i < resolution; ++i) {
    g.t3_values.push_back(t3_range.lo + (t3_range.hi - t3_range.lo) * i / (resolution - 1));
    g.t4_values.push_back(t4_range.lo + (t4_range.hi - t4_range.lo) * i / (resolution - 1));
  }
  const int total = resolution * resolution;
  g.cells.resize(total);
  auto work = [&](int begin, int stride) {
    for (int idx = begin; idx < total; idx += stride) {
      const int i3 = idx % resolution, i4 = idx / resolution;
      g.cells[idx] = classify_cell(kind, base.with_couplings(g.t3_values[i3], g.t4_values[i4]), options);
    }
  };
  const int workers = std::min(worker_count(options.workers), total);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }

  auto key = [&](const PhaseCell& c) {
    if (!c.error.empty()) return std::string("error");
    return options.topology_boundaries && kind == DiagramKind::eigenmode ? c.topology : c.label;
  };
  const double h3 = g.t3_values[1] - g.t3_values[0], h4 = g.t4_values[1] - g.t4_values[0];
  for (int i4 = 0; i4 < resolution; ++i4)
    for (int i3 = 0; i3 < resolution; ++i3) {
      const auto& c = g.at(i3, i4);
      if (i3 + 1 < resolution && key(c) != key(g.at(i3 + 1, i4))) {
        const double t3 = c.t3 + 0.5 * h3;
        g.boundaries.push_back({t3, c.t4 - 0.5 * h4, t3, c.t4 + 0.5 * h4, key(c), key(g.at(i3 + 1, i4))});
      }
      if (i4 + 1 < resolution && key(c) != key(g.at(i3, i4 + 1))) {
        const double t4 = c.t4 + 0.5 * h4;
        g.boundaries.push_back({c.t3 - 0.5 * h3, t4, c.t3 + 0.5 * h3, t4, key(c), key(g.at(i3, i4 + 1))});
      }
    }
  return g;
}

double gap_closing_bisection(const ModelParams& base, bool vary_t3, double fixed, double t_lo,
                             double t_hi, double tol) {
  auto gapless = [&](double t) {
    const ModelParams p = vary_t3 ? base.with_couplings(t, fixed) : base.with_couplings(fixed, t);
    return real_line_gap(p, 256) < kGaplessThreshold;
  };
  const bool g_lo = gapless(t_lo);
  if (g_lo == gapless(t_hi)) throw InvalidArgument("bracket does not straddle a gap closing");
  while (std::abs(t_hi - t_lo) > tol) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (gapless(mid) == g_lo)
      t_lo = mid;
    else
      t_hi = mid;
  }
  return 0.5 * (t_lo + t_hi);
}

std::vector<PathSample> lyapunov_path_scan(LyapunovPath path, int samples,
                                           const PathScanOptions& options) {
  if (samples < 16) throw InvalidArgument("samples must be >= 16");
  std::vector<PathSample> out;
  for (int i = 0; i < samples; ++i) {
    PathSample s;
    s.m = options.m_max * i / (samples - 1);
    s.t3 = path == LyapunovPath::path1 ? 2.0 + s.m : 10.0;
    s.t4 = path == LyapunovPath::path1 ? 2.0 : 2.0 + s.m;
    ModelParams p;
    p.t3 = s.t3;
    p.t4 = s.t4;
    p.n_cells = options.n_cells;
    try {
      s.lambda = lyapunov_zero_drift(p);
      if (options.fit_growth) s.growth_fit = growth_rate_fit(p, options.fit_time).rate;
      s.dynamic_class = to_string(dynamic_phase(p, p.n_cells).cls);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> second_differences(const std::vector<PathSample>& samples) {
  std::vector<double> d(samples.size(), 0.0);
  for (std::size_t i = 1; i + 1 < samples.size(); ++i)
    d[i] = std::abs(samples[i + 1].lambda - 2.0 * samples[i].lambda + samples[i - 1].lambda);
  return d;
}

}  // namespace gt
