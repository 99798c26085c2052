#include "sparsegd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sparsegd::plot {

namespace {

constexpr double kLogFloor = 1e-300;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bounds {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();

  void include(double x, double y) {
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

RenderResult render_line_svg(const std::vector<Series>& series, const std::optional<Band>& band,
                             const PlotStyle& style) {
  if (series.empty()) throw std::invalid_argument("render_line_svg: no series");
  for (const Series& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size())
      throw std::invalid_argument("render_line_svg: bad series '" + s.label + "'");
  }
  if (band && (band->x.size() != band->lower.size() || band->x.size() != band->upper.size()))
    throw std::invalid_argument("render_line_svg: band arrays must have equal lengths");

  RenderResult result;
  auto value = [&](double y) {
    if (style.log_y && y < kLogFloor) {
      ++result.floored_values;
      y = kLogFloor;
    }
    return style.log_y ? std::log10(y) : y;
  };

  Bounds bounds;
  std::vector<Series> mapped = series;
  for (Series& s : mapped)
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      s.y[i] = value(s.y[i]);
      bounds.include(s.x[i], s.y[i]);
    }
  std::optional<Band> mapped_band = band;
  if (mapped_band) {
    for (std::size_t i = 0; i < mapped_band->x.size(); ++i) {
      mapped_band->lower[i] = value(mapped_band->lower[i]);
      mapped_band->upper[i] = value(mapped_band->upper[i]);
      bounds.include(mapped_band->x[i], mapped_band->lower[i]);
      bounds.include(mapped_band->x[i], mapped_band->upper[i]);
    }
  }
  if (bounds.x_max == bounds.x_min) bounds.x_max = bounds.x_min + 1.0;
  if (bounds.y_max == bounds.y_min) {
    bounds.y_max += 0.5;
    bounds.y_min -= 0.5;
  }

  const double margin_left = 70, margin_right = 20, margin_top = 40, margin_bottom = 50;
  const double plot_w = style.width - margin_left - margin_right;
  const double plot_h = style.height - margin_top - margin_bottom;
  auto sx = [&](double x) {
    return margin_left + (x - bounds.x_min) / (bounds.x_max - bounds.x_min) * plot_w;
  };
  auto sy = [&](double y) {
    return margin_top + (bounds.y_max - y) / (bounds.y_max - bounds.y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
      << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  if (result.floored_values > 0)
    svg << "<!-- warning: " << result.floored_values
        << " nonpositive values floored to 1e-300 for the log scale -->\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height
      << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << margin_left << "\" y=\"" << margin_top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444444\"/>\n";

  if (!style.title.empty())
    svg << "<text x=\"" << style.width / 2.0 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape_xml(style.title)
        << "</text>\n";
  svg << "<text x=\"" << margin_left + plot_w / 2.0 << "\" y=\"" << style.height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << escape_xml(style.x_label) << "</text>\n";
  if (!style.y_label.empty())
    svg << "<text x=\"18\" y=\"" << margin_top + plot_h / 2.0
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << margin_top + plot_h / 2.0 << ")\">"
        << escape_xml(style.log_y ? "log10 " + style.y_label : style.y_label) << "</text>\n";

  // Axis extremes as tick labels.
  svg << "<text x=\"" << margin_left << "\" y=\"" << style.height - 30
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(bounds.x_min) << "</text>\n";
  svg << "<text x=\"" << margin_left + plot_w << "\" y=\"" << style.height - 30
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt(bounds.x_max) << "</text>\n";
  svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << margin_top + plot_h
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt(bounds.y_min) << "</text>\n";
  svg << "<text x=\"" << margin_left - 6 << "\" y=\"" << margin_top + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt(bounds.y_max) << "</text>\n";

  if (mapped_band) {
    svg << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < mapped_band->x.size(); ++i)
      svg << fmt(sx(mapped_band->x[i])) << ',' << fmt(sy(mapped_band->upper[i])) << ' ';
    for (std::size_t i = mapped_band->x.size(); i-- > 0;)
      svg << fmt(sx(mapped_band->x[i])) << ',' << fmt(sy(mapped_band->lower[i])) << ' ';
    svg << "\"/>\n";
  }

  for (std::size_t s = 0; s < mapped.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < mapped[s].x.size(); ++i)
      svg << fmt(sx(mapped[s].x[i])) << ',' << fmt(sy(mapped[s].y[i])) << ' ';
    svg << "\"/>\n";
    if (!mapped[s].label.empty())
      svg << "<text x=\"" << margin_left + plot_w - 8 << "\" y=\""
          << margin_top + 16 + 14 * static_cast<double>(s)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
          << "\">" << escape_xml(mapped[s].label) << "</text>\n";
  }

  svg << "</svg>\n";
  result.svg = svg.str();
  return result;
}

RenderResult write_svg(const std::filesystem::path& path, const std::vector<Series>& series,
                       const std::optional<Band>& band, const PlotStyle& style) {
  RenderResult result = render_line_svg(series, band, style);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << result.svg;
  return result;
}

}  // namespace sparsegd::plot
