#include "reach/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace reach {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kMarginLeft = 70.0, kMarginRight = 20.0;
constexpr double kMarginTop = 40.0, kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::add_series(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::string& label) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("series x and y must have equal length");
  }
  series_.push_back({x, y, label, false});
}

void SvgPlot::add_points(const std::vector<double>& x,
                         const std::vector<double>& y,
                         const std::string& label) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("series x and y must have equal length");
  }
  series_.push_back({x, y, label, true});
}

void SvgPlot::write(const std::string& path) const {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const Series& s : series_) {
    for (double v : s.x) {
      x_min = std::min(x_min, v);
      x_max = std::max(x_max, v);
    }
    for (double v : s.y) {
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
  }
  if (series_.empty() || !std::isfinite(x_min) || !std::isfinite(y_min)) {
    x_min = y_min = 0.0;
    x_max = y_max = 1.0;
  }
  if (x_max <= x_min) {
    x_max = x_min + 1.0;
  }
  if (y_max <= y_min) {
    y_max = y_min + 1.0;
  }
  // Pad the vertical range a little so lines do not hug the frame.
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double v) {
    return kMarginLeft + (v - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double v) {
    return kMarginTop + plot_h - (v - y_min) / (y_max - y_min) * plot_h;
  };

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write SVG file: " + path);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth)
      << " " << num(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title_
      << "</text>\n";

  // Frame and tick labels (min / max on each axis).
  out << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(kMarginTop)
      << "\" width=\"" << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  out << "<text x=\"" << num(kMarginLeft) << "\" y=\""
      << num(kHeight - kMarginBottom + 18)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(x_min)
      << "</text>\n";
  out << "<text x=\"" << num(kWidth - kMarginRight) << "\" y=\""
      << num(kHeight - kMarginBottom + 18)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << num(x_max) << "</text>\n";
  out << "<text x=\"" << num(kMarginLeft - 6) << "\" y=\""
      << num(kHeight - kMarginBottom)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << num(y_min) << "</text>\n";
  out << "<text x=\"" << num(kMarginLeft - 6) << "\" y=\""
      << num(kMarginTop + 10)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << num(y_max) << "</text>\n";
  out << "<text x=\"" << num(kMarginLeft + plot_w / 2) << "\" y=\""
      << num(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label_ << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(kMarginTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
      << " transform=\"rotate(-90 16 " << num(kMarginTop + plot_h / 2)
      << ")\">" << y_label_ << "</text>\n";

  for (size_t s = 0; s < series_.size(); ++s) {
    const Series& ser = series_[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (ser.points) {
      for (size_t i = 0; i < ser.x.size(); ++i) {
        out << "<circle cx=\"" << num(sx(ser.x[i])) << "\" cy=\""
            << num(sy(ser.y[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.6\" points=\"";
      for (size_t i = 0; i < ser.x.size(); ++i) {
        if (i > 0) {
          out << ' ';
        }
        out << num(sx(ser.x[i])) << ',' << num(sy(ser.y[i]));
      }
      out << "\"/>\n";
    }
    if (!ser.label.empty()) {
      const double ly = kMarginTop + 14.0 + 16.0 * static_cast<double>(s);
      out << "<rect x=\"" << num(kMarginLeft + plot_w - 150) << "\" y=\""
          << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"" << color
          << "\"/>\n";
      out << "<text x=\"" << num(kMarginLeft + plot_w - 135) << "\" y=\""
          << num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << ser.label << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace reach
