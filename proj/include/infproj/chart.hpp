#ifndef INFPROJ_CHART_HPP
#define INFPROJ_CHART_HPP

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "core.hpp"

namespace infproj {

struct chart_series {
  std::string label;
  dvec x;
  dvec y;
};

struct chart_options {
  std::string title;
  std::string x_label = "cpu time (s)";
  std::string y_label = "error";
  bool log_x = false;
  int width = 520;
  int height = 360;
};

namespace detail {

inline const char *series_color(std::size_t i) {
  static const char *palette[] = {"#1f6fb2", "#d1495b", "#2e8b57", "#8860b8",
                                  "#c77f1a", "#4d4d4d", "#13a4b4", "#a23a9c"};
  return palette[i % 8];
}

inline std::string fmt(double v, const char *spec = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace detail

// Hand-rendered single-panel line chart: axes, ticks, legend, one polyline
// per series. Deterministic output for identical inputs.
inline std::string render_line_chart(const std::vector<chart_series> &series,
                                     const chart_options &opt) {
  const double ml = 62, mr = 14, mt = 30, mb = 44;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  for (const chart_series &s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (opt.log_x && !(s.x[i] > 0.0)) continue;
      x_min = std::min(x_min, tx(s.x[i]));
      x_max = std::max(x_max, tx(s.x[i]));
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_min > x_max) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (y_min > y_max) {
    y_min = 0.0;
    y_max = 1.0;
  }
  if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
  const double xpad = 0.02 * (x_max - x_min), ypad = 0.05 * (y_max - y_min);
  x_min -= xpad;
  x_max += xpad;
  y_min -= ypad;
  y_max += ypad;

  auto px = [&](double v) { return ml + (tx(v) - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double v) { return mt + (y_max - v) / (y_max - y_min) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(opt.width) + "\" height=\"" +
         std::to_string(opt.height) + "\" viewBox=\"0 0 " +
         std::to_string(opt.width) + " " + std::to_string(opt.height) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fmt(ml + pw / 2) +
         "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\">" + opt.title + "</text>\n";

  for (int i = 0; i <= 5; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 5.0;
    const double fy = y_min + (y_max - y_min) * i / 5.0;
    const double gx = ml + pw * i / 5.0;
    const double gy = mt + ph - ph * i / 5.0;
    svg += "<line x1=\"" + detail::fmt(gx) + "\" y1=\"" + detail::fmt(mt) +
           "\" x2=\"" + detail::fmt(gx) + "\" y2=\"" + detail::fmt(mt + ph) +
           "\" stroke=\"#e5e5e5\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + detail::fmt(ml) + "\" y1=\"" + detail::fmt(gy) +
           "\" x2=\"" + detail::fmt(ml + pw) + "\" y2=\"" + detail::fmt(gy) +
           "\" stroke=\"#e5e5e5\" stroke-width=\"1\"/>\n";
    const double x_val = opt.log_x ? std::pow(10.0, fx) : fx;
    svg += "<text x=\"" + detail::fmt(gx) + "\" y=\"" +
           detail::fmt(mt + ph + 16) +
           "\" font-size=\"10\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">" + detail::fmt(x_val, "%.3g") +
           "</text>\n";
    svg += "<text x=\"" + detail::fmt(ml - 6) + "\" y=\"" +
           detail::fmt(gy + 3) +
           "\" font-size=\"10\" text-anchor=\"end\" "
           "font-family=\"sans-serif\">" + detail::fmt(fy, "%.3g") +
           "</text>\n";
  }
  svg += "<rect x=\"" + detail::fmt(ml) + "\" y=\"" + detail::fmt(mt) +
         "\" width=\"" + detail::fmt(pw) + "\" height=\"" + detail::fmt(ph) +
         "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + detail::fmt(ml + pw / 2) + "\" y=\"" +
         detail::fmt(static_cast<double>(opt.height) - 8) +
         "\" font-size=\"11\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\">" + opt.x_label + "</text>\n";
  svg += "<text x=\"14\" y=\"" + detail::fmt(mt + ph / 2) +
         "\" font-size=\"11\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 14 " +
         detail::fmt(mt + ph / 2) + ")\">" + opt.y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const chart_series &s = series[si];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (opt.log_x && !(s.x[i] > 0.0)) continue;
      pts += detail::fmt(px(s.x[i])) + "," + detail::fmt(py(s.y[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += detail::series_color(si);
    svg += "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 14 + 14 * static_cast<double>(si);
    svg += "<line x1=\"" + detail::fmt(ml + pw - 110) + "\" y1=\"" +
           detail::fmt(ly - 4) + "\" x2=\"" + detail::fmt(ml + pw - 92) +
           "\" y2=\"" + detail::fmt(ly - 4) + "\" stroke=\"";
    svg += detail::series_color(si);
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fmt(ml + pw - 88) + "\" y=\"" +
           detail::fmt(ly) +
           "\" font-size=\"10\" font-family=\"sans-serif\">" + s.label +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// Two stacked panels (train and test error against time), as in the
// experimental protocol's figures.
inline std::string render_error_chart(
    const std::vector<chart_series> &train,
    const std::vector<chart_series> &test, const std::string &title,
    bool log_x) {
  chart_options top;
  top.title = title + " (train error)";
  top.y_label = "train error";
  top.log_x = log_x;
  chart_options bottom;
  bottom.title = title + " (test error)";
  bottom.y_label = "test error";
  bottom.log_x = log_x;
  const std::string a = render_line_chart(train, top);
  const std::string b = render_line_chart(test, bottom);
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" "
      "height=\"740\" viewBox=\"0 0 520 740\">\n<g>\n" + a +
      "</g>\n<g transform=\"translate(0 370)\">\n" + b + "</g>\n</svg>\n";
  return svg;
}

}  // namespace infproj

#endif
