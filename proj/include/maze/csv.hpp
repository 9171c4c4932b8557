#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace maze::csv {

// Minimal comma-separated table: one header row, '#' comment lines skipped.
// Fields never contain commas in this project's schemas.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 when missing
  // Index of a required column; throws InputError naming the column.
  std::size_t require_column(const std::string& name) const;
};

Table read(const std::filesystem::path& path);

}  // namespace maze::csv
