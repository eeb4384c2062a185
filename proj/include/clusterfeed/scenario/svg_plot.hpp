#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace clusterfeed::scenario {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // draw points instead of a polyline
  std::string color;     // empty: palette
};

struct XYPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<std::pair<double, double>> x_range;
  std::optional<std::pair<double, double>> y_range;
};

/// Line and scatter plots share one renderer. Non-finite points break lines.
std::string xy_plot_svg(const XYPlot& plot);

struct ContourPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;  // columns
  std::vector<double> y;  // rows
  Eigen::MatrixXd values;  // values(row = y index, col = x index); NaN marks an empty cell
  std::vector<double> levels;
  std::vector<Series> overlays;
};

/// Shaded map with marching-squares contour lines plus overlay curves.
std::string contour_plot_svg(const ContourPlot& plot);

struct PolarPlot {
  std::string title;
  std::vector<double> angles;  // radians
  std::vector<std::pair<std::string, std::vector<double>>> traces;  // magnitude per angle
  double dynamic_range_db = 30.0;
};

/// Traces in dB relative to the overall maximum.
std::string polar_plot_svg(const PolarPlot& plot);

}  // namespace clusterfeed::scenario
