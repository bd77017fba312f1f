#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "propci/evaluate.hpp"

namespace propci::io {

// Fixed rendering for every CSV cell: 12 significant digits ("%.12g").
std::string format_double(double value);

struct CurveSeries {
  std::string label;
  std::vector<eval::EvalPoint> points;
};

// CSV dialect: comma separator, '.' decimal point, '\n' line endings, header
// row "p,method,<metric>", series concatenated in order. The file is written
// atomically (temp file in the same directory, then rename).
// Labels must be unique and every series nonempty (std::invalid_argument);
// I/O failures raise std::runtime_error.
void write_curve_csv(const std::string& path, const std::string& metric,
                     const std::vector<CurveSeries>& series);

struct ParsedCurves {
  std::string metric;
  std::vector<CurveSeries> series;  // grouped by label, first-appearance order
};
ParsedCurves read_curve_csv(const std::string& path);

struct PlotRequest {
  std::vector<CurveSeries> series;
  std::optional<std::pair<double, double>> y_range;  // autoscaled when absent
  std::optional<double> nominal_line;  // horizontal reference, e.g. 1 - alpha
  std::string output_path;
  std::string x_label = "p";
  std::string y_label = "value";
};

// Minimal self-contained SVG chart: fixed 800x500 viewport, linear axes,
// exactly one polyline per series, optional dashed reference line, legend
// from the series labels. Same validation and atomicity as the CSV writer.
void write_svg(const PlotRequest& request);

}  // namespace propci::io
