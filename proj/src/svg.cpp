#include "xfer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "xfer/error.hpp"

namespace xfer {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw InputError("chart series '" + s.label + "' has mismatched x/y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(chart.title) + "</text>\n";
  o += "<path d=\"M" + fmt(kLeft) + " " + fmt(kTop) + " V" + fmt(kTop + ph) + " H" + fmt(kLeft + pw) +
       "\" stroke=\"black\" fill=\"none\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    o += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\">" +
         tick_label(yv) + "</text>\n";
  }
  if (!chart.x_categories.empty()) {
    for (std::size_t i = 0; i < chart.x_categories.size(); ++i)
      o += "<text x=\"" + fmt(px(static_cast<double>(i))) + "\" y=\"" + fmt(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + escape(chart.x_categories[i]) + "</text>\n";
  } else {
    std::vector<double> ticks;
    for (const auto& s : chart.series) ticks.insert(ticks.end(), s.x.begin(), s.x.end());
    std::sort(ticks.begin(), ticks.end());
    ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
    if (ticks.size() > 8) ticks = {ticks.front(), ticks.back()};
    for (double t : ticks)
      o += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
           tick_label(t) + "</text>\n";
  }
  o += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 15) + "\" text-anchor=\"middle\">" +
       escape(chart.x_label) + "</text>\n";
  o += "<text x=\"18\" y=\"" + fmt(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       fmt(kTop + ph / 2) + ")\">" + escape(chart.y_label) + "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& series = chart.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      if (i) points += ' ';
      points += fmt(px(series.x[i])) + "," + fmt(py(series.y[i]));
    }
    o += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < series.x.size(); ++i)
      o += "<circle cx=\"" + fmt(px(series.x[i])) + "\" cy=\"" + fmt(py(series.y[i])) + "\" r=\"3\" fill=\"" +
           color + "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
    o += "<line x1=\"" + fmt(kLeft + pw + 12) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(kLeft + pw + 32) +
         "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + fmt(kLeft + pw + 36) + "\" y=\"" + fmt(ly + 4) + "\">" + escape(series.label) +
         "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

void write_svg(const LineChart& chart, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot write '" + path.string() + "'");
  out << render_svg(chart);
  if (!out) throw WriteError("failed writing '" + path.string() + "'");
}

}  // namespace xfer
