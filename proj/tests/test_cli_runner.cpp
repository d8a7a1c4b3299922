#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpilab/config.hpp"
#include "dpilab/errors.hpp"
#include "dpilab/experiment.hpp"
#include "dpilab/report.hpp"

using namespace dpilab;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("dpilab_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

Json uniform_pair() {
  const Json u = {{"statistics", "iid"}, {"marginal", {{"kind", "uniform"}, {"variance", 1.0}}}};
  return Json::array({{{"name", "uniform-pair"}, {"models", {u, u}}}});
}

}  // namespace

TEST_SUITE("cli_runner") {
  TEST_CASE("model parsing") {
    const auto s = parse_spectrum(Json{{"kind", "arma"}, {"ar", {0.5}}, {"innovation_variance", 0.75}}, "s");
    CHECK(s(0.0) == Approx(3.0));
    const auto d = parse_distribution(Json{{"kind", "laplace"}, {"variance", 2.0}}, "d");
    CHECK(d.variance() == Approx(2.0));
    const auto m = parse_model(Json{{"statistics", "filtered-iid"},
                                    {"innovation", {{"kind", "uniform"}, {"half_width", 1.0}}},
                                    {"ar", {0.3}}},
                               "m");
    CHECK_FALSE(m.is_gaussian());
  }

  TEST_CASE("errors name the offending field") {
    auto msg = error_of([] { parse_spectrum(Json{{"kind", "white"}, {"level", 1.0}, {"colour", 2}}, "cases[0].spectra[1]"); });
    CHECK(msg.find("cases[0].spectra[1].colour") != std::string::npos);
    msg = error_of([] { parse_spectrum(Json{{"kind", "arma"}, {"ar", {1.5}}}, "x"); });
    CHECK(msg.find("x") == 0);
    msg = error_of([] { parse_config_document(Json{{"suite", "alpha"}, {"sede", 3}}); });
    CHECK(msg.find("sede") != std::string::npos);
    msg = error_of([] { parse_cases(Suite::Alpha, Json::array({{{"spectra", {{{"kind", "white"}, {"level", -1.0}}}}}}), 1e-6); });
    CHECK(msg.find("cases[0].spectra") != std::string::npos);
    CHECK_THROWS_AS(parse_formats("json,xml", "--format"), ConfigError);
    CHECK_FALSE(parse_suite("nope").has_value());
    CHECK(parse_suite("dpi-check") == Suite::DpiCheck);
  }

  TEST_CASE("run and emit a passing suite") {
    ExperimentConfig c;
    c.suite = Suite::DpiCheck;
    c.cases = uniform_pair();
    c.output_dir = scratch_dir("pass");
    const auto out = run_experiment(c);
    CHECK(out.exit_code == kExitPass);
    REQUIRE(out.report.cases.size() == 1);
    CHECK(out.report.cases[0].result["margin"].get<double>() == Approx(0.2523).epsilon(1e-3));

    const auto j = Json::parse(slurp(c.output_dir / "dpi-check.json"));
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["seed"] == kDefaultSeed);
    CHECK(j["cases"][0]["name"] == "uniform-pair");
    CHECK(j["cases"][0]["result"]["margin"].get<double>() == out.report.cases[0].result["margin"].get<double>());

    std::stringstream csv(slurp(c.output_dir / "dpi-check.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 2);
    CHECK_FALSE(fs::exists(c.output_dir / "dpi-check_failures.json"));
  }

  TEST_CASE("assertion failures give exit code 2 and a manifest") {
    ExperimentConfig c;
    c.suite = Suite::DpiCheck;
    c.cases = uniform_pair();
    c.cases[0]["expect"] = {{"margin", {0.5, 1e-3}}};
    c.output_dir = scratch_dir("fail");
    const auto out = run_experiment(c);
    CHECK(out.exit_code == kExitAssertion);
    const auto m = Json::parse(slurp(c.output_dir / "dpi-check_failures.json"));
    CHECK(m.dump().find("expect.margin") != std::string::npos);
  }

  TEST_CASE("config errors give exit code 1") {
    ExperimentConfig c;
    c.suite = Suite::Szego;
    c.cases = Json::array({{{"spectrum", {{"kind", "white"}, {"level", 1.0}}}, {"sizes", {8, 4}}}});
    c.output_dir = scratch_dir("err");
    const auto out = run_experiment(c);
    CHECK(out.exit_code == kExitError);
    CHECK_FALSE(out.message.empty());
  }

  TEST_CASE("reports are deterministic and independent of jobs") {
    ExperimentConfig c;
    c.suite = Suite::Alpha;
    c.cases = Json::array();
    for (double r : {1.0, 2.0, 3.0, 5.0})
      c.cases.push_back({{"spectra", {{{"kind", "white"}, {"level", 1.0}}, {{"kind", "piecewise"}, {"breakpoints", {0.2}}, {"levels", {1.0, r}}}}}});
    const auto a = run_suite(c);
    c.jobs = 4;
    const auto b = run_suite(c);
    CHECK(to_json(a, "x") == to_json(b, "x"));
    CHECK(to_csv(a) == to_csv(b));
  }

  TEST_CASE("table CSV and atomic writes") {
    Table t{"gaps", {"n", "gap"}, {{4, 0.5}, {16, 0.125}}};
    const auto s = to_csv(t);
    CHECK(s.find("n,gap") == 0);
    const auto d = scratch_dir("atomic");
    fs::create_directories(d);
    write_atomic(d / "x.txt", "first");
    write_atomic(d / "x.txt", "second");
    CHECK(slurp(d / "x.txt") == "second");
    CHECK_FALSE(fs::exists(d / "x.txt.tmp"));
  }
}
