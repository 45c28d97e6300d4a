#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <CLI11.hpp>

#ifndef GTSYM_VERSION
#define GTSYM_VERSION "0.0.0"
#endif

namespace gtsym {

namespace {

using Keys = std::vector<KeySpec>;

Keys output_keys() {
  return {{"out", ".", "output directory"}, {"format", "csv", "csv | json"}};
}

Keys model_keys(const std::string& cells) {
  return {{"t1", "1", "intra-chain hopping t1"},
          {"t2", "2", "intra-chain hopping t2"},
          {"t3", "", "inter-chain hopping a->b"},
          {"t4", "", "inter-chain hopping b->a"},
          {"cells", cells, "unit cells"}};
}

Keys join(std::initializer_list<Keys> parts) {
  Keys out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::map<std::string, Keys>& registry() {
  static const std::map<std::string, Keys> keys = [] {
    const Keys time_keys = {{"tmax", "auto", "final time; auto = 3x transit estimate"},
                            {"times", "uniform:201", "uniform:N | log:N"},
                            {"site", "middle", "initial delta site"},
                            {"method", "spectral", "spectral | stepped"},
                            {"precision", "extended", "standard | extended"}};
    std::map<std::string, Keys> m;
    m["spectrum"] = join({model_keys("40"),
                          {{"precision", "standard", "standard | extended"},
                           {"vectors", "false", "also write |R_j(x)|^2 per mode"}},
                          output_keys()});
    m["bands"] = join({model_keys("40"), {{"k-count", "256", "k points on [-pi, pi]"}},
                       output_keys()});
    m["gbz"] = join({model_keys("40"), {{"precision", "standard", "standard | extended"}},
                     output_keys()});
    m["evolve"] = join({model_keys("40"), time_keys, output_keys()});
    m["decompose"] = join({model_keys("40"), time_keys,
                           {{"basis", "all", "obc | gbz | bz | all"},
                            {"k-count", "128", "k points for the bz basis"},
                            {"origin", "middle", "z-transform origin site"}},
                           output_keys()});
    m["phase-diagram"] = join({{{"kind", "eigenmode", "eigenmode | dynamic"},
                                {"t1", "1", "intra-chain hopping t1"},
                                {"t2", "2", "intra-chain hopping t2"},
                                {"t3", "0.2:10", "t3 range lo:hi"},
                                {"t4", "0.2:10", "t4 range lo:hi"},
                                {"res", "64", "grid points per axis"},
                                {"cells", "40", "unit cells (dynamic kind)"},
                                {"k-count", "128", "k points (eigenmode kind)"}},
                               output_keys()});
    m["lyapunov-scan"] = join({{{"path", "2", "1: t3 = 2 + m, t4 = 2; 2: t3 = 10, t4 = 2 + m"},
                                {"samples", "32", "points along the path"},
                                {"m-max", "8", "path parameter range [0, m-max]"},
                                {"cells", "40", "unit cells"},
                                {"fit", "true", "also fit the growth rate directly"},
                                {"fit-time", "2000", "growth fit horizon"}},
                               output_keys()});
    m["green"] = join({model_keys("60"),
                       {{"omega-re", "", "Re omega"},
                        {"omega-im", "", "Im omega"},
                        {"i", "middle", "row site"},
                        {"j", "middle", "column site"},
                        {"method", "both", "contour | resolvent | both"}},
                       output_keys()});
    return m;
  }();
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw UsageError(key, key + ": expected a number, got '" + v + "'");
  return out;
}

}  // namespace

const std::vector<KeySpec>& command_keys(const std::string& command) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw UsageError("command", "unknown command '" + command + "'");
  return it->second;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum",      "bands",         "gbz",
                                                 "evolve",        "decompose",     "phase-diagram",
                                                 "lyapunov-scan", "green"};
  return names;
}

bool RunConfig::has(const std::string& key) const { return settings.count(key) > 0; }

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = settings.find(key);
  if (it == settings.end()) throw UsageError(key, "missing key " + key);
  return it->second.value;
}

double RunConfig::number(const std::string& key) const { return parse_double(key, text(key)); }

int RunConfig::integer(const std::string& key) const {
  const auto& v = text(key);
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw UsageError(key, key + ": expected an integer, got '" + v + "'");
  return out;
}

bool RunConfig::flag(const std::string& key) const {
  const auto& v = text(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError(key, key + ": expected true or false, got '" + v + "'");
}

std::pair<double, double> RunConfig::range(const std::string& key) const {
  const auto& v = text(key);
  const auto colon = v.find(':');
  if (colon == std::string::npos)
    throw UsageError(key, key + ": expected lo:hi, got '" + v + "'");
  const double lo = parse_double(key, v.substr(0, colon));
  const double hi = parse_double(key, v.substr(colon + 1));
  if (!(lo < hi)) throw UsageError(key, key + ": range must satisfy lo < hi");
  return {lo, hi};
}

std::string RunConfig::choice(const std::string& key,
                              const std::vector<std::string>& allowed) const {
  const auto& v = text(key);
  for (const auto& a : allowed)
    if (a == v) return v;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : " | ") + a;
  throw UsageError(key, key + ": expected " + list + ", got '" + v + "'");
}

Format RunConfig::format() const {
  return choice("format", {"csv", "json"}) == "csv" ? Format::csv : Format::json;
}

std::string RunConfig::out_dir() const { return text("out"); }

gt::ModelParams RunConfig::model() const {
  gt::ModelParams p;
  p.t1 = number("t1");
  p.t2 = number("t2");
  p.t3 = number("t3");
  p.t4 = number("t4");
  p.n_cells = integer("cells");
  return p;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config", "cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config", path + ":" + std::to_string(number) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty())
      throw UsageError("config", path + ":" + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig resolve_config(const std::string& command, const std::string& config_file,
                         const std::map<std::string, std::string>& flags) {
  const auto& keys = command_keys(command);
  std::set<std::string> known;
  for (const auto& k : keys) known.insert(k.name);

  std::map<std::string, std::string> file;
  if (!config_file.empty()) file = read_config_file(config_file);
  for (const auto& [k, v] : file)
    if (!known.count(k)) throw UsageError(k, "unknown key '" + k + "' for " + command);
  for (const auto& [k, v] : flags)
    if (!known.count(k)) throw UsageError(k, "unknown key '" + k + "' for " + command);

  RunConfig cfg;
  cfg.command = command;
  cfg.config_file = config_file;
  for (const auto& k : keys) {
    Setting s{k.fallback, "default", std::nullopt};
    if (const auto f = file.find(k.name); f != file.end()) {
      s.value = f->second;
      s.source = "file";
      s.file_value = f->second;
    }
    if (const auto f = flags.find(k.name); f != flags.end()) {
      s.value = f->second;
      s.source = "flag";
    }
    if (s.source == "default" && k.fallback.empty())
      throw UsageError(k.name, "missing required key " + k.name);
    cfg.settings[k.name] = std::move(s);
  }
  return cfg;
}

std::optional<RunConfig> parse_config(const std::vector<std::string>& argv) {
  CLI::App app{"glide-time symmetric double SSH chain toolkit", "gtsym"};
  app.set_version_flag("--version", std::string(GTSYM_VERSION));
  app.require_subcommand(1);

  std::string config_file;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::vector<CLI::Option*>> options;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_file, "key=value file; flags take precedence");
    for (const auto& k : command_keys(name)) {
      auto desc = k.help + (k.fallback.empty() ? " (required)" : " [" + k.fallback + "]");
      options[name].push_back(sub->add_option("--" + k.name, values[name][k.name], desc));
    }
  }

  std::vector<std::string> args(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    std::string key = "argv";
    const std::string what = e.what();
    for (const auto& name : command_names())
      for (const auto& k : command_keys(name))
        if (what.find("--" + k.name) != std::string::npos) key = k.name;
    throw UsageError(key, what);
  }

  for (const auto& name : command_names()) {
    auto* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;
    std::map<std::string, std::string> flags;
    for (auto* opt : options[name]) {
      if (opt->count() == 0) continue;
      const auto key = opt->get_name().substr(2);
      flags[key] = values[name][key];
    }
    return resolve_config(name, config_file, flags);
  }
  throw UsageError("command", "no command given");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace gtsym
