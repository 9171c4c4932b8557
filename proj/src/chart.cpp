#include "maze/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "maze/error.hpp"

namespace maze::chart {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 90;
constexpr int kMarginRight = 180;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 70;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x_min, x_max, y_min, y_max;
  bool log_y;

  double px(double x) const {
    const double t = (x_max == x_min) ? 0.5 : (x - x_min) / (x_max - x_min);
    return kMarginLeft + t * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    const double lo = log_y ? std::log10(y_min) : y_min;
    const double hi = log_y ? std::log10(y_max) : y_max;
    const double t = (hi == lo) ? 0.5 : (v - lo) / (hi - lo);
    return kHeight - kMarginBottom - t * (kHeight - kMarginTop - kMarginBottom);
  }
};

void open_svg(std::ostringstream& svg, const std::string& title, const std::string& x_label,
              const std::string& y_label) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
      << "font-family=\"sans-serif\">" << escape(title) << "</text>\n";
  svg << "<text x=\"" << (kMarginLeft + (kWidth - kMarginLeft - kMarginRight) / 2) << "\" y=\""
      << kHeight - 18 << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"24\" y=\"" << (kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2)
      << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
      << "transform=\"rotate(-90 24 " << (kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2)
      << ")\">" << escape(y_label) << "</text>\n";
}

void draw_axes(std::ostringstream& svg) {
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
      << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
      << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
      << "\" stroke=\"black\"/>\n";
}

void draw_legend(std::ostringstream& svg, const std::vector<std::string>& names) {
  const int x = kWidth - kMarginRight + 16;
  int y = kMarginTop + 10;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
        << color << "\"/>\n";
    svg << "<text x=\"" << x + 18 << "\" y=\"" << y + 2
        << "\" font-size=\"13\" font-family=\"sans-serif\">" << escape(names[i]) << "</text>\n";
    y += 22;
  }
}

std::string format_tick(double v) {
  std::ostringstream s;
  if (std::abs(v) >= 10000 || (std::abs(v) < 0.01 && v != 0)) {
    s.precision(1);
    s << std::scientific << v;
  } else {
    s.precision(4);
    s << v;
  }
  return s.str();
}

void draw_y_ticks(std::ostringstream& svg, const Frame& frame) {
  if (frame.log_y) {
    const int lo = static_cast<int>(std::floor(std::log10(frame.y_min)));
    const int hi = static_cast<int>(std::ceil(std::log10(frame.y_max)));
    for (int e = lo; e <= hi; ++e) {
      const double v = std::pow(10.0, e);
      if (v < frame.y_min || v > frame.y_max) continue;
      const double y = frame.py(v);
      svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << y << "\" x2=\""
          << kWidth - kMarginRight << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
      svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e" << e
          << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = frame.y_min + (frame.y_max - frame.y_min) * i / 5.0;
      const double y = frame.py(v);
      svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << y << "\" x2=\""
          << kWidth - kMarginRight << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
      svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">"
          << format_tick(v) << "</text>\n";
    }
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << content;
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool log_y) {
  if (series.empty()) throw InputError("line chart needs at least one series");

  Frame frame{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
              std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(), log_y};
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (log_y && y <= 0) throw InputError("log-scale chart requires positive values");
      frame.x_min = std::min(frame.x_min, x);
      frame.x_max = std::max(frame.x_max, x);
      frame.y_min = std::min(frame.y_min, y);
      frame.y_max = std::max(frame.y_max, y);
    }
  }
  if (frame.x_min > frame.x_max) throw InputError("line chart has no points");
  if (!log_y) frame.y_min = std::min(frame.y_min, 0.0);

  std::ostringstream svg;
  open_svg(svg, title, x_label, y_label);
  draw_axes(svg);
  draw_y_ticks(svg, frame);

  // x ticks at the distinct point positions (small categorical ranges).
  std::vector<double> xs;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 12);
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double x = frame.px(xs[i]);
    svg << "<line x1=\"" << x << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\"" << x
        << "\" y2=\"" << kHeight - kMarginBottom + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << kHeight - kMarginBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << format_tick(xs[i]) << "</text>\n";
  }

  std::vector<std::string> names;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    names.push_back(series[i].name);
    std::vector<std::pair<double, double>> pts = series[i].points;
    std::sort(pts.begin(), pts.end());
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) svg << frame.px(x) << "," << frame.py(y) << " ";
    svg << "\"/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx=\"" << frame.px(x) << "\" cy=\"" << frame.py(y) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
  }
  draw_legend(svg, names);
  svg << "</svg>\n";
  write_file(path, svg.str());
}

void write_bar_chart(const std::filesystem::path& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<std::string>& series_names,
                     const std::vector<BarGroup>& groups) {
  if (series_names.empty() || groups.empty()) throw InputError("bar chart needs data");
  double y_max = 0;
  for (const BarGroup& g : groups) {
    if (g.values.size() != series_names.size()) {
      throw InputError("bar group '" + g.label + "' has the wrong number of values");
    }
    for (double v : g.values) y_max = std::max(y_max, v);
  }
  if (y_max <= 0) y_max = 1;

  Frame frame{0, 1, 0, y_max, false};
  std::ostringstream svg;
  open_svg(svg, title, x_label, y_label);
  draw_axes(svg);
  draw_y_ticks(svg, frame);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double group_w = plot_w / static_cast<double>(groups.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(series_names.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const double gx = kMarginLeft + group_w * (static_cast<double>(gi) + 0.1);
    for (std::size_t si = 0; si < series_names.size(); ++si) {
      const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
      const double v = groups[gi].values[si];
      const double top = frame.py(v);
      svg << "<rect x=\"" << gx + bar_w * static_cast<double>(si) << "\" y=\"" << top
          << "\" width=\"" << bar_w * 0.92 << "\" height=\""
          << (kHeight - kMarginBottom - top) << "\" fill=\"" << color << "\"/>\n";
    }
    svg << "<text x=\"" << gx + group_w * 0.4 << "\" y=\"" << kHeight - kMarginBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << escape(groups[gi].label) << "</text>\n";
  }
  draw_legend(svg, series_names);
  svg << "</svg>\n";
  write_file(path, svg.str());
}

}  // namespace maze::chart
