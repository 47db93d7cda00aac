#pragma once

#include <string>
#include <vector>

namespace reach {

// Minimal line-plot SVG writer: autoscaled axes, polyline series with a
// small legend, deterministic text output.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_series(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& label);
  // Scatter markers instead of a connected line.
  void add_points(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& label);

  void write(const std::string& path) const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string label;
    bool points = false;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

}  // namespace reach
