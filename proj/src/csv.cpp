#include "maze/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "maze/error.hpp"

namespace maze::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

int Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::size_t Table::require_column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw InputError("csv is missing required column '" + name + "'");
  return static_cast<std::size_t>(idx);
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open csv: " + path.string());
  Table table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (table.columns.empty()) {
      table.columns = split_line(line);
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  if (table.columns.empty()) throw FormatError(path.string() + ": csv has no header row");
  return table;
}

}  // namespace maze::csv
