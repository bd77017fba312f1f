#include "propci/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace propci::io {

namespace {

void validate_series(const std::vector<CurveSeries>& series) {
  if (series.empty())
    throw std::invalid_argument("curve output: need at least one series");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i].points.empty())
      throw std::invalid_argument("curve output: series '" + series[i].label +
                                  "' is empty");
    if (series[i].label.find_first_of(",\n\"") != std::string::npos)
      throw std::invalid_argument("curve output: label '" + series[i].label +
                                  "' contains a delimiter");
    for (std::size_t j = 0; j < i; ++j)
      if (series[j].label == series[i].label)
        throw std::invalid_argument("curve output: duplicate label '" +
                                    series[i].label + "'");
  }
}

// Write-to-temp-then-rename so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << body;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("failed while writing '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path +
                             "': " + std::strerror(err));
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#17becf"};

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_curve_csv(const std::string& path, const std::string& metric,
                     const std::vector<CurveSeries>& series) {
  validate_series(series);
  if (metric.empty() || metric.find_first_of(",\n\"") != std::string::npos)
    throw std::invalid_argument("write_curve_csv: bad metric name '" + metric +
                                "'");
  std::string body = "p,method," + metric + "\n";
  for (const CurveSeries& s : series)
    for (const eval::EvalPoint& pt : s.points) {
      body += format_double(pt.p);
      body += ',';
      body += s.label;
      body += ',';
      body += format_double(pt.value);
      body += '\n';
    }
  atomic_write(path, body);
}

ParsedCurves read_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("'" + path + "': missing header row");
  if (line.rfind("p,method,", 0) != 0)
    throw std::runtime_error("'" + path + "': malformed header '" + line + "'");
  ParsedCurves parsed;
  parsed.metric = line.substr(9);
  std::size_t lineno = 1;
  const auto parse_field = [&](const std::string& field) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(field.c_str(), &end);
    if (errno != 0 || end != field.c_str() + field.size() || field.empty())
      throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) +
                               ": bad number '" + field + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw std::runtime_error("'" + path + "' line " + std::to_string(lineno) +
                               ": expected exactly three fields");
    const double p = parse_field(line.substr(0, c1));
    const std::string label = line.substr(c1 + 1, c2 - c1 - 1);
    const double value = parse_field(line.substr(c2 + 1));
    auto it = std::find_if(parsed.series.begin(), parsed.series.end(),
                           [&](const CurveSeries& s) { return s.label == label; });
    if (it == parsed.series.end()) {
      parsed.series.push_back({label, {}});
      it = std::prev(parsed.series.end());
    }
    it->points.push_back({p, value});
  }
  if (parsed.series.empty())
    throw std::runtime_error("'" + path + "': no data rows");
  return parsed;
}

void write_svg(const PlotRequest& request) {
  validate_series(request.series);
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 70, kRight = 640, kTop = 20, kBottom = 450;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const CurveSeries& s : request.series)
    for (const eval::EvalPoint& pt : s.points) {
      xmin = std::min(xmin, pt.p);
      xmax = std::max(xmax, pt.p);
      ymin = std::min(ymin, pt.value);
      ymax = std::max(ymax, pt.value);
    }
  if (request.nominal_line) {
    ymin = std::min(ymin, *request.nominal_line);
    ymax = std::max(ymax, *request.nominal_line);
  }
  if (request.y_range) {
    ymin = request.y_range->first;
    ymax = request.y_range->second;
    if (!(ymin < ymax))
      throw std::invalid_argument("write_svg: y_range must be increasing");
  } else {
    const double pad = 0.05 * std::max(ymax - ymin, 1e-9);
    ymin -= pad;
    ymax += pad;
  }
  if (xmin == xmax) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const auto sx = [&](double p) {
    return kLeft + (p - xmin) / (xmax - xmin) * (kRight - kLeft);
  };
  const auto sy = [&](double v) {
    return kBottom - (v - ymin) / (ymax - ymin) * (kBottom - kTop);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";

  // axes with five ticks per side
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    svg << "<line x1=\"" << svg_num(sx(fx)) << "\" y1=\"" << kBottom
        << "\" x2=\"" << svg_num(sx(fx)) << "\" y2=\"" << kBottom + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << svg_num(sx(fx)) << "\" y=\"" << kBottom + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << svg_num(fx)
        << "</text>\n"
        << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << svg_num(sy(fy))
        << "\" x2=\"" << kLeft << "\" y2=\"" << svg_num(sy(fy))
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << svg_num(sy(fy) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << svg_num(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 8
      << "\" font-size=\"13\" text-anchor=\"middle\">"
      << xml_escape(request.x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << (kTop + kBottom) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (kTop + kBottom) / 2 << ")\">" << xml_escape(request.y_label)
      << "</text>\n";

  if (request.nominal_line && *request.nominal_line >= ymin &&
      *request.nominal_line <= ymax) {
    const double y = sy(*request.nominal_line);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << svg_num(y) << "\" x2=\""
        << kRight << "\" y2=\"" << svg_num(y)
        << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (std::size_t i = 0; i < request.series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const eval::EvalPoint& pt : request.series[i].points) {
      if (!first) svg << ' ';
      first = false;
      svg << svg_num(sx(pt.p)) << ',' << svg_num(sy(pt.value));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(i) + 8;
    svg << "<line x1=\"" << kRight + 12 << "\" y1=\"" << ly << "\" x2=\""
        << kRight + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << kRight + 40 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << xml_escape(request.series[i].label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  atomic_write(request.output_path, svg.str());
}

}  // namespace propci::io
