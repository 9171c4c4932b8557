#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace maze::chart {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Self-contained SVG line chart; log_y switches the y axis to log10 (all y
// values must then be positive).
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_y);

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per series name
};

void write_bar_chart(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<std::string>& series_names,
                     const std::vector<BarGroup>& groups);

}  // namespace maze::chart
