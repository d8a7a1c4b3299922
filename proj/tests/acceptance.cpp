// Acceptance runner: one line per criterion. Each criterion runs the library
// check and then re-derives its headline numbers with the test oracles.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dpilab/battery.hpp"
#include "dpilab/config.hpp"
#include "oracles.hpp"

#ifndef DPILAB_CLI_PATH
#error "DPILAB_CLI_PATH must name the dpilab executable"
#endif

namespace fs = std::filesystem;
using dpilab::Json;

namespace {

struct Verdict {
  bool ok = true;
  std::vector<std::string> lines;

  void expect(bool cond, const std::string& what) {
    ok = ok && cond;
    lines.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string fmt(double v, const char* f = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

void oracle_1(const Json& m, Verdict& v) {
  // flat vs half-band step {1, 3}: ln-ratios are constant on each half band
  const double a0 = std::exp(0.5 * std::log(0.5) + 0.5 * std::log(0.25));
  const double a1 = std::exp(0.5 * std::log(0.5) + 0.5 * std::log(0.75));
  const auto a = m["white_piecewise_alphas"];
  v.expect(near(a[0].get<double>(), a0, 1e-9) && near(a[1].get<double>(), a1, 1e-9),
           "alphas " + fmt(a[0].get<double>()) + ", " + fmt(a[1].get<double>()) + " vs oracle " + fmt(a0) + ", " +
               fmt(a1));
  v.expect(near(a0, std::pow(8.0, -0.5), 1e-15) && near(a1, std::sqrt(3.0 / 8.0), 1e-15),
           "oracle alphas equal 8^(-1/2) and sqrt(3/8)");
}

void oracle_2(const Json& m, Verdict& v) {
  const double step = 1.0 - std::pow(8.0, -0.5) - std::sqrt(3.0 / 8.0);
  v.expect(near(m["white_piecewise_margin"].get<double>(), step, 1e-8),
           "Gaussian flat vs step margin " + fmt(m["white_piecewise_margin"].get<double>()) + " vs 1 - sum(alpha) " +
               fmt(step));
  const double a = std::sqrt(3.0);
  const double d_sum = oracle::gaussian_entropy(2.0) - oracle::triangle_entropy(a);
  const double d_u = oracle::gaussian_entropy(1.0) - oracle::uniform_entropy(a);
  const double exact = std::exp(-2.0 * d_sum) - std::exp(-2.0 * d_u);
  v.expect(near(m["uniform_pair_margin"].get<double>(), exact, 1e-5),
           "uniform pair margin " + fmt(m["uniform_pair_margin"].get<double>()) + " vs triangle/uniform closed form " +
               fmt(exact));
}

void oracle_3(const Json& m, Verdict& v) {
  // Proportional pair Phi, 2.5 Phi: alpha = (1, 2.5) / 3.5. Raising every
  // term to the power 2B leaves lhs = 1 and rhs = sum alpha^(2B).
  const double a0 = 1.0 / 3.5, a1 = 2.5 / 3.5;
  for (const auto& row : m["proportional"]) {
    const double band = row["bandwidth"].get<double>();
    const double closed = 1.0 - std::pow(a0, 2.0 * band) - std::pow(a1, 2.0 * band);
    const double got = row["per_time_margin"].get<double>();
    v.expect(near(got, closed, 1e-8), "B = " + fmt(band) + ": per-time margin " + fmt(got) +
                                          " equals 1 - sum alpha^(2B) = " + fmt(closed));
  }
  v.note("analysis: under per-time scaling a proportional pair has margin 1 - sum alpha^(2B), which is zero only at");
  v.note("2B = 1. Equality under both normalizations cannot hold for B != 1/2; the per-sample form is exact.");
}

void oracle_4(const Json& m, Verdict& v) {
  // AR(1), unit innovations: (1/N) ln|T_N| = -ln(1 - a^2) / N exactly.
  const std::vector<int> sizes{64, 128, 256, 512};
  const double a = 0.9;
  double worst = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    worst = std::max(worst, std::abs(m["ar1_gaps"][i].get<double>() + std::log(1.0 - a * a) / sizes[i]));
  v.expect(worst <= 1e-9, "AR(1) gaps vs -ln(1 - a^2)/N: max difference " + fmt(worst, "%.3e"));
  // Jacobi eigenvalues of a small AR(1) Toeplitz matrix reproduce the log-det
  std::vector<double> r;
  for (int k = 0; k < 24; ++k) r.push_back(oracle::ar1_autocovariance(a, 1.0, k));
  double sum = 0.0;
  for (double e : oracle::jacobi_eigenvalues(oracle::toeplitz(r))) sum += std::log(e);
  v.expect(near(sum, 24 * std::log(1.0 / (1.0 - a * a)) + 23 * std::log(1.0 - a * a), 1e-9),
           "Jacobi sum ln(lambda) at N=24 matches the closed-form log-det");
}

void oracle_5(const Json& m, Verdict& v) {
  const double exact = 12.0 * oracle::kE - 24.0;
  v.expect(near(m["uniform_margin"].get<double>(), exact, 1e-4),
           "uniform EPI margin " + fmt(m["uniform_margin"].get<double>()) + " vs 12e - 24 = " + fmt(exact));
}

void oracle_6(const Json& m, Verdict& v) {
  const double a = std::sqrt(3.0);
  const double tri = oracle::divergence_symmetric(
      [&](double x) { return std::max(0.0, (2.0 * a - std::abs(x * std::sqrt(2.0))) / (4.0 * a * a)) * std::sqrt(2.0); },
      1.0, {0.0, a * std::sqrt(2.0)});
  v.expect(near(m["uniform_d2"].get<double>(), tri, 1e-6),
           "uniform D_2 " + fmt(m["uniform_d2"].get<double>()) + " vs Simpson " + fmt(tri));
  const double lap = oracle::divergence_symmetric([](double x) { return oracle::laplace_sum_pdf(x, 0.5, 2); }, 1.0,
                                                  {0.0, 5.0, 15.0, 40.0});
  const double got = m["ladders"]["laplace"][1].get<double>();
  v.expect(near(got, lap, 1e-6), "Laplace D_2 " + fmt(got) + " vs Simpson " + fmt(lap));
  const double b3 = 1.0 / std::sqrt(2.0) / std::sqrt(3.0);
  const double lap3 = oracle::divergence_symmetric([&](double x) { return oracle::laplace_sum_pdf(x, b3, 3); }, 1.0,
                                                   {0.0, 5.0, 15.0, 40.0});
  const double got3 = m["ladders"]["laplace"][2].get<double>();
  v.expect(near(got3, lap3, 1e-6), "Laplace D_3 " + fmt(got3) + " vs Simpson " + fmt(lap3));
}

void oracle_7(const Json& m, Verdict& v) {
  const auto w = m["worked"];
  const std::vector<double> closed{std::log(3.5), 0.5 * std::log(10.0), 0.5 * (2.5 - std::log(3.5)),
                                   0.25 * (5.0 - std::log(10.0))};
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(w[i].get<double>() - closed[i]));
  v.expect(worst <= 1e-12, "worked tuple vs closed forms: max difference " + fmt(worst, "%.3e"));
  // Gaussian-smoothed uniform at q = 1 and q = 100 by nested Simpson
  const double a = std::sqrt(3.0);
  const auto smoothed = [&](double q) {
    const double s = std::sqrt(q);
    return oracle::divergence_symmetric([&](double y) { return oracle::smoothed_uniform_pdf(y, s * a, 1.0); },
                                        q + 1.0, {0.0, s * a - 3.0 > 0 ? s * a - 3.0 : 0.5, s * a + 3.0, s * a + 14.0},
                                        1200);
  };
  for (std::size_t i : {0u, 2u}) {
    const double q = i == 0 ? 1.0 : 100.0;
    const double ref = smoothed(q);
    const double got = m["scalar_channel"][i].get<double>();
    v.expect(near(got, ref, 1e-6), "scalar channel at q = " + fmt(q) + ": " + fmt(got) + " vs Simpson " + fmt(ref));
  }
  v.expect(near(m["integrated_cmmse"].get<double>(), std::log(2.0), 1e-3),
           "integrated CMMSE " + fmt(m["integrated_cmmse"].get<double>()) + " vs ln 2");
}

// Runs the CLI twice with different job counts and compares the reports.
void oracle_8(Verdict& v) {
  const auto base = fs::temp_directory_path() / "dpilab_acceptance_replay";
  fs::remove_all(base);
  std::vector<Json> docs;
  for (int jobs : {1, 4}) {
    const auto dir = base / ("jobs" + std::to_string(jobs));
    const std::string cmd = std::string("\"") + DPILAB_CLI_PATH + "\" full --jobs " + std::to_string(jobs) +
                            " --format json --out \"" + dir.string() + "\" > \"" + (base / "log.txt").string() +
                            "\" 2>&1";
    fs::create_directories(base);
    const int rc = std::system(cmd.c_str());
    v.note("dpilab full --jobs " + std::to_string(jobs) + " exit status " + std::to_string(rc));
    std::ifstream in(dir / "full.json");
    if (!in) {
      v.expect(false, "report " + (dir / "full.json").string() + " missing");
      return;
    }
    Json j = Json::parse(in);
    j.erase("generated_at");
    docs.push_back(j);
  }
  v.expect(docs[0] == docs[1], "CLI reports identical apart from generated_at (jobs 1 vs 4)");
}

int run(int id) {
  const dpilab::BatteryOptions opt;
  const auto r = dpilab::run_criterion(id, opt);
  Verdict v;
  v.ok = r.passed;
  for (const auto& d : r.details) v.note(d);
  for (const auto& f : r.failures) v.lines.push_back("FAIL " + f);
  try {
    switch (id) {
      case 1: oracle_1(r.metrics, v); break;
      case 2: oracle_2(r.metrics, v); break;
      case 3: oracle_3(r.metrics, v); break;
      case 4: oracle_4(r.metrics, v); break;
      case 5: oracle_5(r.metrics, v); break;
      case 6: oracle_6(r.metrics, v); break;
      case 7: oracle_7(r.metrics, v); break;
      case 8: oracle_8(v); break;
    }
  } catch (const std::exception& e) {
    v.expect(false, std::string("oracle check threw: ") + e.what());
  }
  std::cout << (v.ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << r.title << "\n";
  for (const auto& l : v.lines) std::cout << "    " << l << "\n";
  std::cout.flush();
  return v.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: dpilab_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (ids.empty())
    for (int i = 1; i <= dpilab::kCriteriaCount; ++i) ids.push_back(i);
  int failed = 0;
  for (int id : ids) {
    if (id < 1 || id > dpilab::kCriteriaCount) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    failed += run(id);
  }
  return failed ? 1 : 0;
}
