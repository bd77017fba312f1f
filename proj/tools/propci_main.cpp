#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "propci/evaluate.hpp"
#include "propci/intervals.hpp"
#include "propci/io.hpp"

namespace {

using propci::ConfidenceSpec;
using propci::Interval;
using propci::Method;
using propci::SampleSummary;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // domain or I/O failure
constexpr int kExitUsage = 2;   // bad flags / malformed values

struct GridFlag {
  std::string raw = "0.001:0.999:999";
  propci::eval::Grid parsed;
};

// "start:stop:count" -> Grid; syntax errors only (range checks are the
// evaluate module's domain errors).
bool parse_grid(const std::string& raw, propci::eval::Grid& grid) {
  double start = 0, stop = 0;
  int count = 0;
  char tail = 0;
  if (std::sscanf(raw.c_str(), "%lf:%lf:%d%c", &start, &stop, &count, &tail) !=
      3)
    return false;
  grid = propci::eval::Grid{start, stop, count};
  return true;
}

std::string grid_syntax_check(const std::string& raw) {
  propci::eval::Grid g;
  return parse_grid(raw, g) ? "" : "expected start:stop:count, got '" + raw + "'";
}

std::string single_method_check(const std::string& raw) {
  try {
    propci::method_from_string(raw);
    return "";
  } catch (const std::invalid_argument& e) {
    return std::string(e.what());
  }
}

std::string methods_check(const std::string& raw) {
  std::string token;
  std::stringstream ss(raw);
  while (std::getline(ss, token, ',')) {
    if (token == "all") continue;
    try {
      propci::method_from_string(token);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
  }
  return "";
}

std::vector<Method> parse_methods(const std::string& raw) {
  std::vector<Method> methods;
  const auto push = [&](Method m) {
    for (Method have : methods)
      if (have == m) return;
    methods.push_back(m);
  };
  std::string token;
  std::stringstream ss(raw);
  while (std::getline(ss, token, ',')) {
    if (token == "all")
      for (Method m : propci::kAllMethods) push(m);
    else
      push(propci::method_from_string(token));
  }
  if (methods.empty())
    throw std::invalid_argument("no methods given; use --methods all");
  return methods;
}

ConfidenceSpec make_spec(double alpha, const std::optional<double>& kappa) {
  return kappa ? ConfidenceSpec::from_alpha_kappa(alpha, *kappa)
               : ConfidenceSpec::from_alpha(alpha);
}

nlohmann::json interval_json(const Interval& iv) {
  nlohmann::json j{{"lower", iv.lower},
                   {"upper", iv.upper},
                   {"method", std::string(propci::method_name(iv.method))},
                   {"n", iv.sample.n},
                   {"x", iv.sample.x},
                   {"alpha", iv.spec.alpha},
                   {"kappa", iv.spec.kappa}};
  if (iv.aux_u) j["u"] = *iv.aux_u;
  return j;
}

void print_interval_text(const Interval& iv) {
  using propci::io::format_double;
  std::cout << "method: " << propci::method_name(iv.method) << "\n"
            << "n: " << iv.sample.n << "\n"
            << "x: " << iv.sample.x << "\n"
            << "alpha: " << format_double(iv.spec.alpha) << "\n"
            << "kappa: " << format_double(iv.spec.kappa) << "\n";
  if (iv.aux_u) std::cout << "u: " << format_double(*iv.aux_u) << "\n";
  std::cout << "lower: " << format_double(iv.lower) << "\n"
            << "upper: " << format_double(iv.upper) << "\n"
            << "width: " << format_double(iv.width()) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binomial proportion confidence intervals and their exact evaluation"};
  app.require_subcommand(1);

  // ---- compute ----
  std::string c_method;
  int c_n = 0, c_x = 0;
  double c_alpha = 0.05;
  std::optional<double> c_kappa, c_u;
  std::optional<std::uint64_t> c_seed;
  std::string c_format = "text";
  CLI::App* compute = app.add_subcommand("compute", "Compute one interval");
  compute->add_option("--method", c_method, "Interval method")
      ->required()
      ->check(CLI::Validator(
          [](std::string& v) { return single_method_check(v); }, "METHOD"));
  compute->add_option("--n", c_n, "Trial count")->required();
  compute->add_option("--x", c_x, "Success count")->required();
  compute->add_option("--alpha", c_alpha, "Two-sided miscoverage");
  compute->add_option("--kappa", c_kappa, "Critical value override");
  compute->add_option("--u", c_u, "Stevens randomization value in [0,1]");
  compute->add_option("--seed", c_seed, "Seed used to draw u (stevens only)");
  compute->add_option("--format", c_format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  // ---- coverage / length ----
  std::string v_methods = "all";
  int v_n = 0;
  double v_alpha = 0.05;
  std::optional<double> v_kappa;
  GridFlag v_grid;
  std::string v_out, v_svg;
  int v_quad = 16;
  const auto add_curve_flags = [&](CLI::App* cmd) {
    cmd->add_option("--methods", v_methods,
                    "Comma-separated method list, or 'all'")
        ->check(CLI::Validator(
            [](std::string& v) { return methods_check(v); }, "METHODS"));
    cmd->add_option("--n", v_n, "Trial count")->required();
    cmd->add_option("--alpha", v_alpha, "Two-sided miscoverage");
    cmd->add_option("--kappa", v_kappa, "Critical value override");
    cmd->add_option("--grid", v_grid.raw, "p grid as start:stop:count")
        ->check(CLI::Validator(
            [](std::string& v) { return grid_syntax_check(v); }, "GRID"));
    cmd->add_option("--out", v_out, "CSV output path")->required();
    cmd->add_option("--svg", v_svg, "Optional SVG chart path");
  };
  CLI::App* coverage =
      app.add_subcommand("coverage", "Exact coverage probability curves");
  add_curve_flags(coverage);
  CLI::App* length =
      app.add_subcommand("length", "Expected interval length curves");
  add_curve_flags(length);
  length->add_option("--quad-points", v_quad,
                     "Gauss-Legendre nodes for the stevens u-average");

  // ---- bias ----
  std::string b_method;
  int b_n = 0;
  double b_alpha = 0.05, b_window = 0.05;
  std::optional<double> b_kappa;
  GridFlag b_grid{"0.1:0.9:33", {}};
  std::string b_out;
  CLI::App* bias =
      app.add_subcommand("bias", "Smoothed coverage bias along a p grid");
  bias->add_option("--method", b_method, "Interval method")
      ->required()
      ->check(CLI::Validator(
          [](std::string& v) { return single_method_check(v); }, "METHOD"));
  bias->add_option("--n", b_n, "Trial count")->required();
  bias->add_option("--alpha", b_alpha, "Two-sided miscoverage");
  bias->add_option("--kappa", b_kappa, "Critical value override");
  bias->add_option("--grid", b_grid.raw, "p grid as start:stop:count")
      ->check(CLI::Validator(
          [](std::string& v) { return grid_syntax_check(v); }, "GRID"));
  bias->add_option("--window", b_window, "Moving-average window width");
  bias->add_option("--out", b_out, "CSV output path")->required();

  // ---- compare ----
  int t_n = 0, t_x = 0;
  double t_alpha = 0.05;
  std::optional<double> t_kappa;
  std::string t_format = "text";
  CLI::App* compare =
      app.add_subcommand("compare", "All eight intervals for one sample");
  compare->add_option("--n", t_n, "Trial count")->required();
  compare->add_option("--x", t_x, "Success count")->required();
  compare->add_option("--alpha", t_alpha, "Two-sided miscoverage");
  compare->add_option("--kappa", t_kappa, "Critical value override");
  compare->add_option("--format", t_format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(compute)) {
      const Method method = propci::method_from_string(c_method);
      if (method != Method::StevensXU && (c_u || c_seed)) {
        std::cerr << "error: --u/--seed apply only to --method stevens\n";
        return kExitUsage;
      }
      if (method == Method::StevensXU && !c_u && !c_seed) {
        std::cerr << "error: --method stevens needs --u or --seed\n";
        return kExitUsage;
      }
      const Interval iv = propci::compute(method, SampleSummary{c_n, c_x},
                                          make_spec(c_alpha, c_kappa), c_u,
                                          c_seed);
      if (c_format == "json") {
        std::cout << interval_json(iv).dump() << "\n";
      } else if (c_format == "csv") {
        using propci::io::format_double;
        std::cout << "method,n,x,alpha,kappa,u,lower,upper,width\n"
                  << propci::method_name(iv.method) << ',' << iv.sample.n
                  << ',' << iv.sample.x << ',' << format_double(iv.spec.alpha)
                  << ',' << format_double(iv.spec.kappa) << ','
                  << (iv.aux_u ? format_double(*iv.aux_u) : std::string())
                  << ',' << format_double(iv.lower) << ','
                  << format_double(iv.upper) << ','
                  << format_double(iv.width()) << "\n";
      } else {
        print_interval_text(iv);
      }
      return kExitOk;
    }

    if (app.got_subcommand(coverage) || app.got_subcommand(length)) {
      const bool is_length = app.got_subcommand(length);
      parse_grid(v_grid.raw, v_grid.parsed);
      const ConfidenceSpec spec = make_spec(v_alpha, v_kappa);
      std::vector<propci::io::CurveSeries> series;
      for (Method m : parse_methods(v_methods)) {
        std::vector<propci::eval::EvalPoint> pts =
            is_length ? propci::eval::length_curve(m, v_n, spec, v_grid.parsed,
                                                   v_quad)
                      : propci::eval::coverage_curve(m, v_n, spec,
                                                     v_grid.parsed);
        series.push_back({std::string(propci::method_name(m)), std::move(pts)});
      }
      const std::string metric = is_length ? "expected_length" : "coverage";
      propci::io::write_curve_csv(v_out, metric, series);
      if (!v_svg.empty()) {
        propci::io::PlotRequest plot;
        plot.series = series;
        plot.output_path = v_svg;
        plot.y_label = metric;
        if (!is_length) plot.nominal_line = 1.0 - spec.alpha;
        propci::io::write_svg(plot);
      }
      return kExitOk;
    }

    if (app.got_subcommand(bias)) {
      parse_grid(b_grid.raw, b_grid.parsed);
      const ConfidenceSpec spec = make_spec(b_alpha, b_kappa);
      const Method method = propci::method_from_string(b_method);
      propci::io::CurveSeries s{std::string(propci::method_name(method)), {}};
      for (double p : b_grid.parsed.points())
        s.points.push_back(
            {p, propci::eval::smoothed_bias(method, b_n, spec, p, b_window)});
      propci::io::write_curve_csv(b_out, "smoothed_bias", {s});
      return kExitOk;
    }

    if (app.got_subcommand(compare)) {
      const ConfidenceSpec spec = make_spec(t_alpha, t_kappa);
      const SampleSummary sample{t_n, t_x};
      std::vector<Interval> rows;
      for (Method m : propci::kAllMethods)
        rows.push_back(m == Method::StevensXU
                           ? propci::stevens(sample, spec, 0.5)
                           : propci::compute(m, sample, spec));
      using propci::io::format_double;
      if (t_format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const Interval& iv : rows) j.push_back(interval_json(iv));
        std::cout << j.dump() << "\n";
      } else if (t_format == "csv") {
        std::cout << "method,lower,upper,width\n";
        for (const Interval& iv : rows)
          std::cout << propci::method_name(iv.method) << ','
                    << format_double(iv.lower) << ',' << format_double(iv.upper)
                    << ',' << format_double(iv.width()) << "\n";
      } else {
        std::printf("%-18s %-16s %-16s %-16s\n", "method", "lower", "upper",
                    "width");
        for (const Interval& iv : rows)
          std::printf("%-18s %-16s %-16s %-16s\n",
                      std::string(propci::method_name(iv.method)).c_str(),
                      format_double(iv.lower).c_str(),
                      format_double(iv.upper).c_str(),
                      format_double(iv.width()).c_str());
        std::printf("stevens evaluated at u = 0.5, where it equals mid_p\n");
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}
