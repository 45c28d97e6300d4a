#include "table.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace gtsym {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error(name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

std::string write_table(const Table& table, const std::string& dir, Format format,
                        const std::string& command) {
  const auto file = table.name + (format == Format::csv ? ".csv" : ".json");
  const auto path = std::filesystem::path(dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  if (format == Format::csv) {
    out << "# schema=1\n# gtsym " << command << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << csv_escape(table.columns[c]);
    out << "\r\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
      out << "\r\n";
    }
  } else {
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = command;
    doc["columns"] = table.columns;
    auto records = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json rec;
      for (std::size_t c = 0; c < row.size(); ++c) rec[table.columns[c]] = cell_json(row[c]);
      records.push_back(std::move(rec));
    }
    doc["records"] = std::move(records);
    out << doc.dump(1) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return file;
}

}  // namespace gtsym
