#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace xfer {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  // Category names for the x axis; when set, x values index into them.
  std::vector<std::string> x_categories;
  bool log_x = false;
};

// Static SVG polyline chart. Output depends only on the chart contents.
std::string render_svg(const LineChart& chart);
void write_svg(const LineChart& chart, const std::filesystem::path& path);

}  // namespace xfer
