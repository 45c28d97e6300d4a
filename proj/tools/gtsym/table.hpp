#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace gtsym {

using Cell = std::variant<double, long long, std::string>;

/// Column-named rows written as schema=1 CSV or as a JSON array of records.
struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table(std::string stem, std::vector<std::string> cols)
      : name(std::move(stem)), columns(std::move(cols)) {}

  void add(std::vector<Cell> row);
};

/// Appends `value_re`, `value_im` style pairs.
inline void push_complex(std::vector<Cell>& row, std::complex<double> z) {
  row.emplace_back(z.real());
  row.emplace_back(z.imag());
}

std::string csv_escape(const std::string& s);

/// Writes <dir>/<name>.csv or .json and returns the file name.
std::string write_table(const Table& table, const std::string& dir, Format format,
                        const std::string& command);

}  // namespace gtsym
