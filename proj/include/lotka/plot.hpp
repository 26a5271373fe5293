#pragma once

// SVG rendering of the two figure types: a binned histogram of author counts
// and a log-log scatter of percent-of-authors against level with an optional
// fitted trendline. Every plot comes with a CSV sidecar holding the exact
// plotted coordinates.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "lotka/errors.hpp"
#include "lotka/freqdata.hpp"
#include "lotka/loglogfit.hpp"

namespace lotka {

struct PlotSpec {
  enum class Kind { histogram, loglog };
  Kind kind = Kind::loglog;
  bool include_trendline = false;
  std::string x_label;
  std::string y_label;
  std::string output_path;
  Level bin_width = 1;  // histogram only
};

struct PlotDocument {
  std::string svg;
  std::string sidecar;  // CSV
};

/// Sidecar file written next to the SVG.
inline std::string sidecar_path(const std::string& svg_path) {
  return svg_path + ".csv";
}

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string exact(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string xml_escape(const std::string& s) {
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

struct Canvas {
  static constexpr double width = 640, height = 420;
  static constexpr double left = 70, right = 20, top = 20, bottom = 60;
  double x0, x1, y0, y1;  // data ranges

  double px(double x) const {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  }
  double py(double y) const {
    return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom);
  }
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string svg_open(const PlotSpec& spec) {
  std::string s =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
      "viewBox=\"0 0 640 420\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"345\" y=\"410\" text-anchor=\"middle\">" +
       xml_escape(spec.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"190\" text-anchor=\"middle\" "
       "transform=\"rotate(-90 16 190)\">" +
       xml_escape(spec.y_label) + "</text>\n";
  return s;
}

inline std::string axes() {
  return "<line x1=\"" + num(Canvas::left) + "\" y1=\"" +
         num(Canvas::height - Canvas::bottom) + "\" x2=\"" +
         num(Canvas::width - Canvas::right) + "\" y2=\"" +
         num(Canvas::height - Canvas::bottom) + "\" stroke=\"black\"/>\n" +
         "<line x1=\"" + num(Canvas::left) + "\" y1=\"" + num(Canvas::top) +
         "\" x2=\"" + num(Canvas::left) + "\" y2=\"" +
         num(Canvas::height - Canvas::bottom) + "\" stroke=\"black\"/>\n";
}

}  // namespace detail

inline PlotDocument plot_histogram(const FrequencyDistribution& dist,
                                   const PlotSpec& spec) {
  const auto h = bin_histogram(dist, spec.bin_width);
  Count peak = 1;
  for (const auto& b : h.bins) peak = std::max(peak, b.author_count);

  PlotDocument doc;
  doc.sidecar = "range_start,range_end,author_count,author_percent\n";
  for (const auto& b : h.bins)
    doc.sidecar += std::to_string(b.range_start) + "," +
                   std::to_string(b.range_end) + "," +
                   std::to_string(b.author_count) + "," +
                   detail::exact(b.author_percent) + "\n";

  const detail::Canvas c{0.0, static_cast<double>(h.bins.size()), 0.0,
                         static_cast<double>(peak)};
  doc.svg = detail::svg_open(spec) + detail::axes();
  for (std::size_t i = 0; i < h.bins.size(); ++i) {
    const auto& b = h.bins[i];
    const double x = c.px(static_cast<double>(i)) + 2;
    const double w = c.px(static_cast<double>(i + 1)) - c.px(static_cast<double>(i)) - 4;
    const double y = c.py(static_cast<double>(b.author_count));
    doc.svg += "<rect x=\"" + detail::num(x) + "\" y=\"" + detail::num(y) +
               "\" width=\"" + detail::num(std::max(w, 1.0)) + "\" height=\"" +
               detail::num(c.py(0.0) - y) + "\" fill=\"steelblue\"/>\n";
    doc.svg += "<text x=\"" + detail::num(x + w / 2) + "\" y=\"" +
               detail::num(detail::Canvas::height - detail::Canvas::bottom + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" +
               std::to_string(b.range_start) + "-" + std::to_string(b.range_end) +
               "</text>\n";
    doc.svg += "<text x=\"" + detail::num(x + w / 2) + "\" y=\"" +
               detail::num(y - 4) + "\" text-anchor=\"middle\" font-size=\"10\">" +
               std::to_string(b.author_count) + "</text>\n";
  }
  doc.svg += "</svg>\n";
  return doc;
}

/// Without a fit the points are percentages of the whole distribution. With a
/// fit they are rebuilt exactly as the fit saw them: truncated at the fit's
/// cutoff and normalised by its denominator.
inline PercentSeries loglog_points(const FrequencyDistribution& dist,
                                   const std::optional<FitResult>& fit) {
  if (!fit) return to_percent_series(dist, dist.total_authors());
  const auto kept = fit->cutoff ? truncate_right(dist, *fit->cutoff) : dist;
  return to_percent_series(kept, fit->denominator);
}

inline PlotDocument plot_loglog(const FrequencyDistribution& dist,
                                const std::optional<FitResult>& fit,
                                const PlotSpec& spec) {
  if (spec.include_trendline && !fit)
    throw InputError("trendline requested without a fit");
  const auto series = loglog_points(dist, fit);
  const bool trend = spec.include_trendline;

  PlotDocument doc;
  doc.sidecar = trend ? "level,percent,log10_level,log10_percent,fitted,residual\n"
                      : "level,percent,log10_level,log10_percent\n";
  double ymin = INFINITY, ymax = -INFINITY, xmax = 0.0;
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : series.points) {
    const double x = std::log10(static_cast<double>(p.level));
    const double y = std::log10(p.percent);
    xy.emplace_back(x, y);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
    doc.sidecar += std::to_string(p.level) + "," + detail::exact(p.percent) +
                   "," + detail::exact(x) + "," + detail::exact(y);
    if (trend) {
      const double fitted = fit->intercept + fit->slope * x;
      doc.sidecar += "," + detail::exact(fitted) + "," + detail::exact(y - fitted);
    }
    doc.sidecar += "\n";
  }

  const detail::Canvas c{0.0, std::max(1.0, std::ceil(xmax)), std::floor(ymin),
                         std::max(std::floor(ymin) + 1.0, std::ceil(ymax))};
  doc.svg = detail::svg_open(spec) + detail::axes();
  for (double d = c.x0; d <= c.x1; d += 1.0)
    doc.svg += "<text x=\"" + detail::num(c.px(d)) + "\" y=\"" +
               detail::num(detail::Canvas::height - detail::Canvas::bottom + 16) +
               "\" text-anchor=\"middle\">10^" + std::to_string(int(d)) + "</text>\n";
  for (double d = c.y0; d <= c.y1; d += 1.0)
    doc.svg += "<text x=\"" + detail::num(detail::Canvas::left - 6) + "\" y=\"" +
               detail::num(c.py(d) + 4) + "\" text-anchor=\"end\">10^" +
               std::to_string(int(d)) + "</text>\n";
  for (const auto& [x, y] : xy)
    doc.svg += "<circle cx=\"" + detail::num(c.px(x)) + "\" cy=\"" +
               detail::num(c.py(y)) + "\" r=\"3\" fill=\"steelblue\"/>\n";
  if (trend && !xy.empty()) {
    const double xa = xy.front().first, xb = xy.back().first;
    doc.svg += "<line x1=\"" + detail::num(c.px(xa)) + "\" y1=\"" +
               detail::num(c.py(fit->intercept + fit->slope * xa)) + "\" x2=\"" +
               detail::num(c.px(xb)) + "\" y2=\"" +
               detail::num(c.py(fit->intercept + fit->slope * xb)) +
               "\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n";
    doc.svg += "<text x=\"" + detail::num(detail::Canvas::width - 30) +
               "\" y=\"" + detail::num(detail::Canvas::top + 14) +
               "\" text-anchor=\"end\">slope " + detail::num(fit->slope) +
               ", R^2 " + detail::num(fit->r_squared) + "</text>\n";
  }
  doc.svg += "</svg>\n";
  return doc;
}

inline PlotDocument emit_plot(const FrequencyDistribution& dist,
                              const std::optional<FitResult>& fit,
                              const PlotSpec& spec) {
  return spec.kind == PlotSpec::Kind::histogram ? plot_histogram(dist, spec)
                                                : plot_loglog(dist, fit, spec);
}

}  // namespace lotka
