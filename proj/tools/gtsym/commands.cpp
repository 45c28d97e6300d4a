#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <glidetime/decompose.hpp>
#include <glidetime/dynamics.hpp>
#include <glidetime/error.hpp>
#include <glidetime/gbz.hpp>
#include <glidetime/phases.hpp>
#include <glidetime/spectral.hpp>
#include <json.hpp>

#include "table.hpp"

#ifndef GTSYM_VERSION
#define GTSYM_VERSION "0.0.0"
#endif

namespace gtsym {

namespace {

using json = nlohmann::ordered_json;

struct Output {
  std::vector<Table> tables;
  json diagnostics = json::object();
};

gt::Precision precision_of(const RunConfig& c) {
  return c.choice("precision", {"standard", "extended"}) == "extended" ? gt::Precision::extended
                                                                       : gt::Precision::standard;
}

int site_of(RunConfig& c, const std::string& key, int sites) {
  const int middle = sites / 2;
  const int s = c.text(key) == "middle" ? middle : c.integer(key);
  if (s < 0 || s >= sites)
    throw UsageError(key, key + ": site " + std::to_string(s) + " outside [0, " +
                              std::to_string(sites - 1) + "]");
  c.resolved[key] = std::to_string(s);
  return s;
}

std::vector<double> time_grid(RunConfig& c, const gt::ModelParams& p) {
  const double tmax = c.text("tmax") == "auto" ? gt::default_horizon(p) : c.number("tmax");
  if (!(tmax > 0.0)) throw UsageError("tmax", "tmax: must be positive");
  c.resolved["tmax"] = format_number(tmax);

  const auto& spec = c.text("times");
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  if (colon == std::string::npos || (kind != "uniform" && kind != "log"))
    throw UsageError("times", "times: expected uniform:N or log:N, got '" + spec + "'");
  RunConfig probe;
  probe.settings["times"].value = spec.substr(colon + 1);
  const int n = probe.integer("times");
  if (n < 2) throw UsageError("times", "times: need at least 2 points");
  return kind == "log" ? gt::log_times(tmax, n) : gt::uniform_times(tmax, n);
}

struct Evolution {
  gt::BiorthogonalEigensystem eigensystem;
  gt::EvolutionGrid grid;
};

Evolution run_evolution(RunConfig& c, const gt::ModelParams& p, Output& out) {
  const auto times = time_grid(c, p);
  const int x0 = site_of(c, "site", p.sites());
  gt::EvolveOptions o;
  o.method = c.choice("method", {"spectral", "stepped"}) == "stepped" ? gt::Propagation::stepped
                                                                      : gt::Propagation::spectral;
  o.normalization = gt::Normalization::per_instant;
  o.precision = precision_of(c);
  Evolution ev{gt::obc_eigensystem(p, o.precision), {}};
  ev.grid = gt::evolve(p, ev.eigensystem, gt::delta_state(p.n_cells, x0), times, o);
  out.diagnostics["method"] = gt::to_string(ev.grid.method);
  out.diagnostics["fell_back"] = ev.grid.fell_back;
  out.diagnostics["biorthogonality_error"] = ev.eigensystem.biorthogonality_error();
  out.diagnostics["transit_estimate"] = gt::transit_estimate(p);
  return ev;
}

gt::WeightField obc_weights(const Evolution& ev) {
  return gt::normalized(gt::obc_mode_weights(ev.grid, ev.eigensystem));
}

Table obc_weight_table(const gt::WeightField& field) {
  Table t("weights_obc", {"time", "mode", "energy_re", "energy_im", "weight_re", "weight_im",
                          "weight_abs"});
  for (int r = 0; r < static_cast<int>(field.times.size()); ++r)
    for (int j = 0; j < field.columns(); ++j) {
      const auto& co = field.coordinates[j];
      std::vector<Cell> row{field.times[r], static_cast<long long>(co.mode)};
      push_complex(row, co.energy);
      push_complex(row, field.weights(r, j));
      row.emplace_back(std::abs(field.weights(r, j)));
      t.add(std::move(row));
    }
  return t;
}

Output spectrum(RunConfig& c) {
  const auto p = c.model();
  Output out;
  const auto a = gt::obc_analysis(p, precision_of(c));
  const auto& es = a.eigensystem;
  const auto& cl = a.classification;
  Table t("spectrum", {"mode", "energy_re", "energy_im", "kind", "center_of_mass", "ipr",
                       "boundary_weight"});
  for (int j = 0; j < static_cast<int>(es.size()); ++j) {
    std::vector<Cell> row{static_cast<long long>(j)};
    push_complex(row, es.eigenvalues(j));
    row.insert(row.end(), {std::string(gt::to_string(cl.kind[j])), cl.center_of_mass[j],
                           cl.ipr[j], cl.boundary_weight[j]});
    t.add(std::move(row));
  }
  out.tables.push_back(std::move(t));

  if (c.flag("vectors")) {
    std::vector<std::string> cols{"mode"};
    for (int x = 0; x < p.sites(); ++x) cols.push_back("site_" + std::to_string(x));
    Table v("modes", cols);
    for (int j = 0; j < static_cast<int>(es.size()); ++j) {
      const double norm = es.right.col(j).squaredNorm();
      std::vector<Cell> row{static_cast<long long>(j)};
      for (int x = 0; x < p.sites(); ++x) row.emplace_back(std::norm(es.right(x, j)) / norm);
      v.add(std::move(row));
    }
    out.tables.push_back(std::move(v));
  }

  const auto ph = gt::eigenmode_phase(p);
  std::string dyn = "", freq = "";
  try {
    const auto d = gt::dynamic_phase(p, es.eigenvalues);
    dyn = gt::to_string(d.cls);
    freq = gt::to_string(d.freq);
  } catch (const gt::ClassificationAmbiguous&) {
    dyn = "ambiguous";
  }
  Table inv("invariants", {"topology", "region", "nhse", "zak_total", "line_gap", "winding_neg",
                           "winding_pos", "kramers_gap", "edge_modes", "skin_modes", "bulk_modes",
                           "dynamic_class", "freq"});
  inv.add({std::string(gt::to_string(ph.topology)), std::string(gt::to_string(ph.region)),
           std::string(gt::to_string(ph.nhse)), ph.zak_total, ph.line_gap,
           static_cast<long long>(ph.winding_neg), static_cast<long long>(ph.winding_pos),
           gt::kramers_gap(p), static_cast<long long>(a.count(gt::ModeKind::edge)),
           static_cast<long long>(a.count(gt::ModeKind::skin)),
           static_cast<long long>(a.count(gt::ModeKind::bulk)), dyn, freq});
  out.tables.push_back(std::move(inv));
  out.diagnostics["biorthogonality_error"] = es.biorthogonality_error();
  out.diagnostics["condition_flag"] = es.condition_flag;
  out.diagnostics["degeneracy_warning"] = es.degeneracy_warning;
  return out;
}

Output bands(RunConfig& c) {
  const auto p = c.model();
  Output out;
  const auto b = gt::pbc_bands(p, c.integer("k-count"));
  const auto v = gt::group_velocity(b);
  Table t("bands", {"band", "k", "energy_re", "energy_im", "group_velocity"});
  for (int n = 0; n < b.band_count(); ++n)
    for (std::size_t i = 0; i < b.k.size(); ++i) {
      std::vector<Cell> row{static_cast<long long>(n + 1), b.k[i]};
      push_complex(row, b.energies(n, i));
      row.emplace_back(v(n, i));
      t.add(std::move(row));
    }
  out.tables.push_back(std::move(t));
  return out;
}

Output gbz(RunConfig& c) {
  const auto p = c.model();
  Output out;
  const auto curve = gt::compute_gbz(p, p.n_cells, precision_of(c));
  Table t("gbz", {"beta_re", "beta_im", "energy_re", "energy_im", "source_mode", "branch",
                  "raw_split", "flagged"});
  for (const auto& pt : curve.points) {
    std::vector<Cell> row;
    push_complex(row, pt.beta);
    push_complex(row, pt.energy);
    row.insert(row.end(), {static_cast<long long>(pt.source_mode),
                           static_cast<long long>(pt.branch), pt.split,
                           static_cast<long long>(pt.flagged)});
    t.add(std::move(row));
  }
  out.tables.push_back(std::move(t));
  Table x("gbz_intersections", {"beta_re", "beta_im", "energies"});
  for (const auto& s : curve.self_intersections) {
    std::vector<Cell> row;
    push_complex(row, s.beta);
    row.emplace_back(static_cast<long long>(s.energies.size()));
    x.add(std::move(row));
  }
  out.tables.push_back(std::move(x));

  out.diagnostics["max_modulus"] = curve.max_modulus();
  out.diagnostics["min_modulus"] = curve.min_modulus();
  out.diagnostics["flagged"] = curve.flagged_count();
  out.diagnostics["raw_split_above_tolerance"] = gt::raw_split_count(curve);
  out.diagnostics["excluded_modes"] = curve.excluded_modes;
  try {
    out.diagnostics["nhse"] = gt::to_string(gt::nhse_direction(curve));
  } catch (const gt::UnsupportedBipolar&) {
    out.diagnostics["nhse"] = "bipolar";
  }
  return out;
}

Output evolve(RunConfig& c) {
  const auto p = c.model();
  Output out;
  const auto ev = run_evolution(c, p, out);
  const auto& g = ev.grid;

  std::vector<std::string> cols{"time"};
  for (int x = 0; x < g.sites(); ++x) cols.push_back("site_" + std::to_string(x));
  Table prof("profile", cols);
  for (int r = 0; r < g.rows(); ++r) {
    std::vector<Cell> row{g.times[r]};
    for (int x = 0; x < g.sites(); ++x) row.emplace_back(std::norm(g.psi(r, x)));
    prof.add(std::move(row));
  }
  out.tables.push_back(std::move(prof));

  const auto com = gt::com_trajectory(g);
  const auto edge = gt::boundary_weight(g, 0.1);
  const auto field = obc_weights(ev);
  const gt::CMatrix h = gt::build_real_space(p, gt::Boundary::open).entries.cast<gt::Complex>();
  Table traj("trajectory", {"time", "center_of_mass", "left_weight", "right_weight", "energy_re",
                            "energy_im", "weighted_energy_re", "weighted_energy_im"});
  for (int r = 0; r < g.rows(); ++r) {
    // <psi|H|psi> / <psi|psi> and sum_j |D_j|^2 E_j / sum_j |D_j|^2
    const gt::CVector psi = g.psi.row(r).transpose();
    const gt::Complex e = psi.dot(h * psi) / psi.squaredNorm();
    gt::Complex num = 0.0;
    double den = 0.0;
    for (int j = 0; j < field.columns(); ++j) {
      const double w = std::norm(field.weights(r, j));
      num += w * field.coordinates[j].energy;
      den += w;
    }
    std::vector<Cell> row{g.times[r], com[r], edge.left[r], edge.right[r]};
    push_complex(row, e);
    push_complex(row, den > 0 ? num / den : gt::Complex(std::nan(""), std::nan("")));
    traj.add(std::move(row));
  }
  out.tables.push_back(std::move(traj));
  out.tables.push_back(obc_weight_table(field));
  return out;
}

Output decompose(RunConfig& c) {
  const auto p = c.model();
  Output out;
  const auto basis = c.choice("basis", {"obc", "gbz", "bz", "all"});
  const int origin = site_of(c, "origin", p.sites());
  const auto ev = run_evolution(c, p, out);
  const auto& g = ev.grid;

  if (basis == "obc" || basis == "all") out.tables.push_back(obc_weight_table(obc_weights(ev)));
  if (basis == "gbz" || basis == "all") {
    const auto curve = gt::compute_gbz(p, p.n_cells);
    const auto f = gt::normalized(gt::nonbloch_weights(g, curve, origin));
    Table t("weights_gbz", {"time", "point", "branch", "beta_re", "beta_im", "energy_re",
                            "energy_im", "weight_re", "weight_im", "weight_abs", "flagged"});
    for (int r = 0; r < static_cast<int>(f.times.size()); ++r)
      for (int j = 0; j < f.columns(); ++j) {
        const auto& co = f.coordinates[j];
        std::vector<Cell> row{f.times[r], static_cast<long long>(co.band),
                              static_cast<long long>(co.branch)};
        push_complex(row, co.beta);
        push_complex(row, co.energy);
        push_complex(row, f.weights(r, j));
        row.emplace_back(std::abs(f.weights(r, j)));
        row.emplace_back(static_cast<long long>(co.flagged));
        t.add(std::move(row));
      }
    out.tables.push_back(std::move(t));
    out.diagnostics["gbz_flagged"] = curve.flagged_count();
  }
  if (basis == "bz" || basis == "all") {
    const auto f = gt::bz_fourier_weights(g, gt::pbc_bands(p, c.integer("k-count")));
    Table t("weights_bz", {"time", "band", "k", "energy_re", "energy_im", "weight_re",
                           "weight_im", "weight_abs"});
    for (int r = 0; r < static_cast<int>(f.times.size()); ++r)
      for (int j = 0; j < f.columns(); ++j) {
        const auto& co = f.coordinates[j];
        std::vector<Cell> row{f.times[r], static_cast<long long>(co.band + 1), co.k};
        push_complex(row, co.energy);
        push_complex(row, f.weights(r, j));
        row.emplace_back(std::abs(f.weights(r, j)));
        t.add(std::move(row));
      }
    out.tables.push_back(std::move(t));
  }
  return out;
}

Output phase_diagram(RunConfig& c) {
  Output out;
  const auto kind = c.choice("kind", {"eigenmode", "dynamic"}) == "dynamic"
                        ? gt::DiagramKind::dynamic
                        : gt::DiagramKind::eigenmode;
  gt::ModelParams base;
  base.t1 = c.number("t1");
  base.t2 = c.number("t2");
  base.n_cells = c.integer("cells");
  const auto [a3, b3] = c.range("t3");
  const auto [a4, b4] = c.range("t4");
  gt::DiagramOptions o;
  o.k_count = c.integer("k-count");
  const auto grid = gt::phase_diagram(kind, {a3, b3}, {a4, b4}, c.integer("res"), base, o);

  Table t("phase_grid", {"t3", "t4", "class", "direction", "freq", "topology", "error"});
  for (const auto& cell : grid.cells)
    t.add({cell.t3, cell.t4, cell.label, std::string(gt::to_string(cell.direction)), cell.freq,
           cell.topology, cell.error});
  out.tables.push_back(std::move(t));
  Table b("phase_boundaries", {"t3a", "t4a", "t3b", "t4b", "from", "to"});
  for (const auto& s : grid.boundaries) b.add({s.t3a, s.t4a, s.t3b, s.t4b, s.from, s.to});
  out.tables.push_back(std::move(b));
  long long errors = 0;
  for (const auto& cell : grid.cells) errors += !cell.error.empty();
  out.diagnostics["cell_errors"] = errors;
  return out;
}

Output lyapunov_scan(RunConfig& c) {
  Output out;
  const auto path = c.choice("path", {"1", "2"}) == "1" ? gt::LyapunovPath::path1
                                                        : gt::LyapunovPath::path2;
  gt::PathScanOptions o;
  o.n_cells = c.integer("cells");
  o.m_max = c.number("m-max");
  o.fit_time = c.number("fit-time");
  o.fit_growth = c.flag("fit");
  const auto samples = gt::lyapunov_path_scan(path, c.integer("samples"), o);
  const auto d2 = gt::second_differences(samples);
  Table t("lyapunov", {"m", "t3", "t4", "lambda", "growth_fit", "second_difference", "class",
                       "error"});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    t.add({s.m, s.t3, s.t4, s.lambda, o.fit_growth ? s.growth_fit : std::nan(""), d2[i],
           s.dynamic_class, s.error});
  }
  out.tables.push_back(std::move(t));
  return out;
}

Output green(RunConfig& c) {
  const auto p = c.model();
  Output out;
  const gt::Complex omega(c.number("omega-re"), c.number("omega-im"));
  const int i = site_of(c, "i", p.sites());
  const int j = site_of(c, "j", p.sites());
  const auto method = c.choice("method", {"contour", "resolvent", "both"});

  Table t("green", {"method", "i", "j", "omega_re", "omega_im", "g_re", "g_im"});
  auto add = [&](const std::string& name, gt::Complex g) {
    std::vector<Cell> row{name, static_cast<long long>(i), static_cast<long long>(j)};
    push_complex(row, omega);
    push_complex(row, g);
    t.add(std::move(row));
  };
  if (method != "resolvent") {
    std::optional<gt::GBZCurve> curve;
    if (!p.hermitian()) curve = gt::compute_gbz(p, p.n_cells);
    add("contour", gt::green_element(p, omega, i, j, p.n_cells, {}, curve ? &*curve : nullptr));
  }
  if (method != "contour") {
    gt::GreenOptions o;
    o.method = gt::GreenMethod::resolvent;
    add("resolvent", gt::green_element(p, omega, i, j, p.n_cells, o));
  }
  out.tables.push_back(std::move(t));

  // The contour gives the bulk Green function; the open chain adds end
  // reflections of relative size (|beta_2| / |beta_3|)^d.
  const auto roots = gt::characteristic_beta_roots(p, omega).roots;
  if (roots.size() == 4) {
    const int d = std::min({gt::cell_of(i), gt::cell_of(j), p.n_cells - 1 - gt::cell_of(i),
                            p.n_cells - 1 - gt::cell_of(j)});
    out.diagnostics["end_reflection_factor"] =
        std::pow(std::abs(roots[1]) / std::abs(roots[2]), d);
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_json(const RunConfig& c) {
  json cfg = json::object(), src = json::object(), conflicts = json::object();
  for (const auto& k : command_keys(c.command)) {
    const auto& s = c.settings.at(k.name);
    cfg[k.name] = s.value;
    src[k.name] = s.source;
    if (s.file_value && s.source == "flag" && *s.file_value != s.value)
      conflicts[k.name] = {{"file", *s.file_value}, {"flag", s.value}};
  }
  json m;
  m["config"] = std::move(cfg);
  m["sources"] = std::move(src);
  m["conflicts"] = std::move(conflicts);
  m["resolved"] = c.resolved;
  return m;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::vector<std::string> run(RunConfig& config) {
  const auto format = config.format();
  const std::filesystem::path dir = config.out_dir();
  std::filesystem::create_directories(dir);

  Output out;
  const auto& cmd = config.command;
  if (cmd == "spectrum") out = spectrum(config);
  else if (cmd == "bands") out = bands(config);
  else if (cmd == "gbz") out = gbz(config);
  else if (cmd == "evolve") out = evolve(config);
  else if (cmd == "decompose") out = decompose(config);
  else if (cmd == "phase-diagram") out = phase_diagram(config);
  else if (cmd == "lyapunov-scan") out = lyapunov_scan(config);
  else if (cmd == "green") out = green(config);
  else throw UsageError("command", "unknown command '" + cmd + "'");

  std::vector<std::string> files;
  for (const auto& t : out.tables) files.push_back(write_table(t, dir.string(), format, cmd));

  json m;
  m["schema"] = 1;
  m["tool"] = "gtsym";
  m["version"] = GTSYM_VERSION;
  m["command"] = cmd;
  m["timestamp"] = utc_timestamp();
  m["config_file"] = config.config_file;
  m.update(config_json(config));
  const char* workers = std::getenv("GT_WORKERS");
  m["workers_env"] = workers ? workers : "";
  m["outputs"] = files;
  m["diagnostics"] = out.diagnostics;
  write_json(dir / "manifest.json", m);
  files.push_back("manifest.json");
  return files;
}

ErrorRecord error_record(std::exception_ptr error) {
  auto make = [](ExitCode code, const char* kind, const std::exception& e) {
    return ErrorRecord{code, kind, "", e.what()};
  };
  try {
    std::rethrow_exception(error);
  } catch (const UsageError& e) {
    return ErrorRecord{kUsage, "usage", e.key(), e.what()};
  } catch (const gt::InvalidArgument& e) {
    return make(kUsage, "invalid-argument", e);
  } catch (const gt::UnsupportedBipolar& e) {
    return make(kNumerical, "unsupported-bipolar", e);
  } catch (const gt::ClassificationAmbiguous& e) {
    return make(kNumerical, "classification-ambiguous", e);
  } catch (const gt::NumericalFailure& e) {
    return make(kNumerical, "numerical-failure", e);
  } catch (const std::exception& e) {
    return make(kNumerical, "runtime", e);
  }
}

int run_cli(const std::vector<std::string>& argv, std::ostream& err) {
  std::optional<RunConfig> config;
  ErrorRecord rec;
  try {
    config = parse_config(argv);
    if (!config) return kOk;
    run(*config);
    return kOk;
  } catch (...) {
    rec = error_record(std::current_exception());
  }
  json record;
  record["schema"] = 1;
  record["status"] = "error";
  record["exit_code"] = int(rec.code);
  record["kind"] = rec.kind;
  if (!rec.key.empty()) record["key"] = rec.key;
  record["message"] = rec.message;
  if (config) {
    record["command"] = config->command;
    record.update(config_json(*config));
    try {
      const std::filesystem::path dir = config->out_dir();
      std::filesystem::create_directories(dir);
      write_json(dir / "error.json", record);
    } catch (const std::exception&) {
    }
  }
  err << record.dump() << "\n";
  return rec.code;
}

}  // namespace gtsym
