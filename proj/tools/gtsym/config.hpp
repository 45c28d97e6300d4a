#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <glidetime/lattice.hpp>

namespace gtsym {

/// Bad flag, key or value; carries the offending key when there is one.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Format { csv, json };

struct KeySpec {
  std::string name;
  std::string fallback;  ///< empty: required
  std::string help;
};

/// Keys accepted by `command`, in manifest order.
const std::vector<KeySpec>& command_keys(const std::string& command);
const std::vector<std::string>& command_names();

struct Setting {
  std::string value;
  std::string source;  ///< default, file, flag
  std::optional<std::string> file_value;
};

struct RunConfig {
  std::string command;
  std::string config_file;
  std::map<std::string, Setting> settings;
  /// Values computed from settings at run time (auto tmax, middle site, ...).
  std::map<std::string, std::string> resolved;

  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// "lo:hi"
  std::pair<double, double> range(const std::string& key) const;
  std::string choice(const std::string& key, const std::vector<std::string>& allowed) const;
  Format format() const;
  std::string out_dir() const;

  gt::ModelParams model() const;
};

/// Flat key=value text; '#' starts a comment. Keys are validated against the
/// command later.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Merges defaults < file < flags. Throws UsageError on unknown or missing keys.
RunConfig resolve_config(const std::string& command, const std::string& config_file,
                         const std::map<std::string, std::string>& flags);

/// CLI11 front end; argv[0] is the program name. Returns nullopt after
/// --help / --version output.
std::optional<RunConfig> parse_config(const std::vector<std::string>& argv);

std::string format_number(double v);

}  // namespace gtsym
