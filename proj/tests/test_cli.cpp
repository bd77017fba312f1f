#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "propci/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("propci_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = temp_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = temp_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string("\"") + PROPCI_CLI_PATH + "\" " + args +
                          " >" + out.string() + " 2>" + err.string();
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

nlohmann::json parse_json(const std::string& text) {
  return nlohmann::json::parse(text);
}

}  // namespace

TEST_CASE("compute emits json with every interval field") {
  const CmdResult r = run_cli(
      "compute --method wald --n 100 --x 50 --kappa 2 --format json");
  REQUIRE(r.status == 0);
  CHECK(r.err.empty());
  const auto j = parse_json(r.out);
  CHECK(j["lower"].get<double>() == 0.4);
  CHECK(j["upper"].get<double>() == 0.6);
  CHECK(j["method"] == "wald");
  CHECK(j["n"] == 100);
  CHECK(j["x"] == 50);
  CHECK(j["alpha"].get<double>() == 0.05);
  CHECK(j["kappa"].get<double>() == 2.0);
  CHECK(!j.contains("u"));
}

TEST_CASE("compute reproduces the closed-form clopper_pearson bound") {
  const CmdResult r = run_cli(
      "compute --method clopper_pearson --n 10 --x 0 --format json");
  REQUIRE(r.status == 0);
  const auto j = parse_json(r.out);
  CHECK(j["lower"].get<double>() == 0.0);
  CHECK(std::fabs(j["upper"].get<double>() - 0.3084971078187608) <= 1e-12);
}

TEST_CASE("compute text and csv formats") {
  const CmdResult text =
      run_cli("compute --method wilson --n 40 --x 10");
  REQUIRE(text.status == 0);
  CHECK(text.out.find("method: wilson\n") != std::string::npos);
  CHECK(text.out.find("n: 40\n") != std::string::npos);
  CHECK(text.out.find("lower: 0.141871186391\n") != std::string::npos);
  CHECK(text.out.find("upper: 0.401939614208\n") != std::string::npos);

  const CmdResult csv =
      run_cli("compute --method wilson --n 40 --x 10 --format csv");
  REQUIRE(csv.status == 0);
  std::istringstream lines(csv.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "method,n,x,alpha,kappa,u,lower,upper,width");
  CHECK(row.rfind("wilson,40,10,0.05,", 0) == 0);
  CHECK(row.find(",,") != std::string::npos);  // empty u column
}

TEST_CASE("compute stevens is seed-deterministic and honors --u") {
  const std::string args =
      "compute --method stevens --n 20 --x 5 --seed 7 --format json";
  const CmdResult a = run_cli(args);
  const CmdResult b = run_cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const auto ja = parse_json(a.out);
  CHECK(ja["u"].get<double>() == 0.38982974839127149);

  const CmdResult with_u = run_cli(
      "compute --method stevens --n 20 --x 5 --u 0.5 --format json");
  const CmdResult mid = run_cli(
      "compute --method mid_p --n 20 --x 5 --format json");
  REQUIRE(with_u.status == 0);
  REQUIRE(mid.status == 0);
  const auto ju = parse_json(with_u.out);
  const auto jm = parse_json(mid.out);
  CHECK(ju["lower"].get<double>() == jm["lower"].get<double>());
  CHECK(ju["upper"].get<double>() == jm["upper"].get<double>());
  CHECK(ju["u"].get<double>() == 0.5);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").status == 2);
  CHECK(run_cli("frobnicate").status == 2);
  CHECK(run_cli("compute --method bogus --n 10 --x 3").status == 2);
  CHECK(run_cli("compute --method all --n 10 --x 3").status == 2);
  CHECK(run_cli("compute --method wald --n 10").status == 2);
  CHECK(run_cli("compute --method wald --n 10 --x 3 --format yaml").status ==
        2);
  CHECK(run_cli("coverage --methods wald --n 10 --grid abc --out x.csv")
            .status == 2);
  CHECK(run_cli("coverage --methods wald --n 10 --grid 0.1:0.9 --out x.csv")
            .status == 2);
  CHECK(run_cli("coverage --methods wald,bogus --n 10 --out x.csv").status ==
        2);

  const CmdResult u_misuse =
      run_cli("compute --method wald --n 10 --x 3 --u 0.5");
  CHECK(u_misuse.status == 2);
  CHECK(u_misuse.err.find("--u/--seed apply only") != std::string::npos);
  CHECK(run_cli("compute --method wald --n 10 --x 3 --seed 4").status == 2);

  const CmdResult missing = run_cli("compute --method stevens --n 10 --x 3");
  CHECK(missing.status == 2);
  CHECK(missing.err.find("needs --u or --seed") != std::string::npos);
}

TEST_CASE("domain errors exit with code 1") {
  const CmdResult bad_x = run_cli("compute --method wald --n 10 --x 11");
  CHECK(bad_x.status == 1);
  CHECK(bad_x.err.rfind("error:", 0) == 0);
  CHECK(run_cli("compute --method wald --n 10 --x 3 --alpha 1.5").status == 1);
  CHECK(run_cli("compute --method stevens --n 10 --x 3 --u 1.5").status == 1);
  // Well-formed but out-of-domain grid.
  CHECK(run_cli("coverage --methods wald --n 10 --grid 0:0.9:5 --out " +
                (temp_dir() / "never.csv").string())
            .status == 1);
  // Unwritable output.
  CHECK(run_cli("coverage --methods wald --n 10 --grid 0.2:0.8:3 --out "
                "/nonexistent_dir_zz/c.csv")
            .status == 1);
  // Smoothing window leaving (0, 1).
  CHECK(run_cli("bias --method wald --n 40 --grid 0.01:0.5:3 --out " +
                (temp_dir() / "never2.csv").string())
            .status == 1);
  // Degenerate quadrature order.
  CHECK(run_cli("length --methods stevens --n 8 --grid 0.3:0.7:3 "
                "--quad-points 0 --out " +
                (temp_dir() / "never3.csv").string())
            .status == 1);
}

TEST_CASE("help exits cleanly") {
  const CmdResult top = run_cli("--help");
  CHECK(top.status == 0);
  CHECK(top.out.find("compute") != std::string::npos);
  CHECK(top.out.find("coverage") != std::string::npos);
  CHECK(run_cli("compute --help").status == 0);
}

TEST_CASE("coverage writes curves and an optional chart") {
  const fs::path csv = temp_dir() / "cov.csv";
  const fs::path svg = temp_dir() / "cov.svg";
  const CmdResult r = run_cli(
      "coverage --methods wald,wilson --n 25 --grid 0.1:0.9:17 --out " +
      csv.string() + " --svg " + svg.string());
  REQUIRE(r.status == 0);

  const auto parsed = propci::io::read_curve_csv(csv.string());
  CHECK(parsed.metric == "coverage");
  REQUIRE(parsed.series.size() == 2);
  CHECK(parsed.series[0].label == "wald");
  CHECK(parsed.series[1].label == "wilson");
  for (const auto& s : parsed.series) {
    CHECK(s.points.size() == 17);
    for (const auto& pt : s.points) {
      CHECK(pt.value >= 0.0);
      CHECK(pt.value <= 1.0);
    }
  }

  const std::string chart = slurp(svg);
  std::size_t polylines = 0;
  for (std::size_t pos = chart.find("<polyline"); pos != std::string::npos;
       pos = chart.find("<polyline", pos + 1)) {
    ++polylines;
  }
  CHECK(polylines == 2);
  CHECK(chart.find("stroke-dasharray") != std::string::npos);

  // Runs are byte-deterministic.
  const fs::path csv2 = temp_dir() / "cov_again.csv";
  run_cli("coverage --methods wald,wilson --n 25 --grid 0.1:0.9:17 --out " +
          csv2.string());
  CHECK(slurp(csv) == slurp(csv2));
}

TEST_CASE("coverage handles method lists") {
  const fs::path all_csv = temp_dir() / "all.csv";
  REQUIRE(run_cli("coverage --methods all --n 6 --grid 0.3:0.7:5 --out " +
                  all_csv.string())
              .status == 0);
  const auto all = propci::io::read_curve_csv(all_csv.string());
  REQUIRE(all.series.size() == 8);
  const char* expected[] = {"wald",   "wilson",   "agresti_coull",
                            "clopper_pearson", "mid_p", "jeffreys",
                            "likelihood_ratio", "stevens"};
  for (std::size_t i = 0; i < 8; ++i) CHECK(all.series[i].label == expected[i]);

  // The exact method never dips below nominal; the randomized one sits on it.
  for (const auto& s : all.series) {
    if (s.label == "clopper_pearson") {
      for (const auto& pt : s.points) CHECK(pt.value >= 0.95 - 1e-9);
    }
    if (s.label == "stevens") {
      for (const auto& pt : s.points) {
        CHECK(std::fabs(pt.value - 0.95) <= 1e-9);
      }
    }
  }

  // Duplicates collapse.
  const fs::path dup_csv = temp_dir() / "dup.csv";
  REQUIRE(run_cli("coverage --methods wald,wald --n 6 --grid 0.3:0.7:5 "
                  "--out " +
                  dup_csv.string())
              .status == 0);
  CHECK(propci::io::read_curve_csv(dup_csv.string()).series.size() == 1);
}

TEST_CASE("length writes expected-length curves") {
  const fs::path csv = temp_dir() / "len.csv";
  REQUIRE(run_cli("length --methods clopper_pearson,mid_p --n 40 "
                  "--grid 0.05:0.95:10 --out " +
                  csv.string())
              .status == 0);
  const auto parsed = propci::io::read_curve_csv(csv.string());
  CHECK(parsed.metric == "expected_length");
  REQUIRE(parsed.series.size() == 2);
  for (std::size_t i = 0; i < parsed.series[0].points.size(); ++i) {
    CHECK(parsed.series[0].points[i].value >=
          parsed.series[1].points[i].value);
  }

  const fs::path st_csv = temp_dir() / "len_st.csv";
  REQUIRE(run_cli("length --methods stevens --n 8 --grid 0.3:0.7:3 "
                  "--quad-points 8 --out " +
                  st_csv.string())
              .status == 0);
  const auto st = propci::io::read_curve_csv(st_csv.string());
  for (const auto& pt : st.series[0].points) {
    CHECK(pt.value > 0.0);
    CHECK(pt.value < 1.0);
  }
}

TEST_CASE("bias writes the smoothed-bias curve") {
  const fs::path csv = temp_dir() / "bias.csv";
  REQUIRE(run_cli("bias --method wilson --n 120 --grid 0.2:0.8:5 --out " +
                  csv.string())
              .status == 0);
  const auto parsed = propci::io::read_curve_csv(csv.string());
  CHECK(parsed.metric == "smoothed_bias");
  REQUIRE(parsed.series.size() == 1);
  CHECK(parsed.series[0].label == "wilson");
  REQUIRE(parsed.series[0].points.size() == 5);
  for (const auto& pt : parsed.series[0].points) {
    CHECK(std::fabs(pt.value) < 0.005);
  }

  const fs::path one = temp_dir() / "bias_one.csv";
  REQUIRE(run_cli("bias --method wald --n 40 --grid 0.5:0.5:1 --out " +
                  one.string())
              .status == 0);
  CHECK(propci::io::read_curve_csv(one.string()).series[0].points.size() == 1);
}

TEST_CASE("compare lists all eight methods") {
  const CmdResult csv = run_cli("compare --n 40 --x 20 --format csv");
  REQUIRE(csv.status == 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "method,lower,upper,width");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream fs_(line);
    std::string field;
    while (std::getline(fs_, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 4);
    rows.push_back(fields);
  }
  REQUIRE(rows.size() == 8);
  CHECK(rows.front()[0] == "wald");
  CHECK(rows.back()[0] == "stevens");

  double widest = 0.0;
  std::string widest_method;
  std::vector<std::string> mid_p_row, stevens_row;
  for (const auto& row : rows) {
    const double lower = std::stod(row[1]);
    const double upper = std::stod(row[2]);
    // x = n/2: every interval is symmetric about 1/2.
    CHECK(std::fabs(lower - (1.0 - upper)) <= 1e-9);
    const double width = std::stod(row[3]);
    if (width > widest) {
      widest = width;
      widest_method = row[0];
    }
    if (row[0] == "mid_p") mid_p_row = {row[1], row[2], row[3]};
    if (row[0] == "stevens") stevens_row = {row[1], row[2], row[3]};
  }
  CHECK(widest_method == "clopper_pearson");
  // The stevens row at u = 1/2 duplicates the mid_p row.
  REQUIRE(!mid_p_row.empty());
  CHECK(stevens_row == mid_p_row);

  const CmdResult text = run_cli("compare --n 40 --x 20");
  REQUIRE(text.status == 0);
  CHECK(text.out.find("stevens evaluated at u = 0.5, where it equals mid_p") !=
        std::string::npos);

  const CmdResult json = run_cli("compare --n 40 --x 20 --format json");
  REQUIRE(json.status == 0);
  const auto j = parse_json(json.out);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 8);
  for (const auto& item : j) {
    CHECK(item.contains("lower"));
    CHECK(item.contains("upper"));
  }
  CHECK(j.back()["u"].get<double>() == 0.5);
}
