#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace gtsym {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Runs one resolved command, writing data files and manifest.json into the
/// output directory. Throws on failure; see run_cli for the exit mapping.
std::vector<std::string> run(RunConfig& config);

struct ErrorRecord {
  ExitCode code = kOk;
  std::string kind;
  std::string key;
  std::string message;
};

/// Exit code and kind for an exception escaping parse or run.
ErrorRecord error_record(std::exception_ptr error);

/// Full front end: parse, run, map exceptions to exit codes. Failures print a
/// one-line JSON error record to `err` and, when possible, write error.json.
int run_cli(const std::vector<std::string>& argv, std::ostream& err);

}  // namespace gtsym
