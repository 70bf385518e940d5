#pragma once

#include <string>
#include <vector>

namespace ghostsim {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> yerr;  // empty for no error bars
  bool line = true;          // false: markers with error bars
  std::string color = "#1f6fb4";
};

struct PlotSpec {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  std::vector<PlotSeries> series;
};

/// Static SVG line/marker plot with axes, ticks, legend, padded y range.
void emit_plot(const PlotSpec& spec, const std::string& path);

std::string render_plot_svg(const PlotSpec& spec);

}  // namespace ghostsim
