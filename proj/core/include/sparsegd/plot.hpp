#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sparsegd::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Shaded region between two curves, used for interquartile bands.
struct Band {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct PlotStyle {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool log_y = false;
  int width = 860;
  int height = 520;
};

struct RenderResult {
  std::string svg;
  // Number of values at or below zero that were floored to 1e-300 because of
  // the log scale; a warning comment is embedded in the SVG when nonzero.
  int floored_values = 0;
};

RenderResult render_line_svg(const std::vector<Series>& series, const std::optional<Band>& band,
                             const PlotStyle& style);

RenderResult write_svg(const std::filesystem::path& path, const std::vector<Series>& series,
                       const std::optional<Band>& band, const PlotStyle& style);

}  // namespace sparsegd::plot
