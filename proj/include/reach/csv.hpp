#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "reach/types.hpp"

namespace reach {

// Format a double with 12 significant digits, locale-independent. All CSV
// and SVG output funnels through this so repeated runs are byte-identical.
std::string format_value(double v);

// Minimal CSV emitter: header row on construction, one row per call.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  // Convenience for all-numeric rows.
  void row(const std::vector<double>& values);

  static std::string cell(double v) { return format_value(v); }

 private:
  std::ofstream out_;
  size_t columns_;
};

}  // namespace reach
