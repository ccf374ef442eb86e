#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qualsim::chart {

struct Labels {
  std::string title;
  std::string x_axis;
  std::string y_axis;
};

struct Bar {
  std::string label;
  double value = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// All throw std::invalid_argument on empty input. Output is a standalone SVG
// document.
std::string bar_chart(std::span<const Bar> bars, const Labels& labels);
std::string scatter_chart(std::span<const Point> points, const Labels& labels);
// Exactly two series; the first is read on the left scale and the second on
// the right one. `log_x` spaces the x axis logarithmically.
std::string line_chart(std::span<const Series> series, const Labels& labels, bool log_x = true);

// Round tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

}  // namespace qualsim::chart
