#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dpilab/config.hpp"
#include "dpilab/errors.hpp"
#include "dpilab/experiment.hpp"

namespace {

using dpilab::Json;

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw dpilab::ConfigError(flag + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("DPILAB_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw dpilab::ConfigError(std::string("DPILAB_SEED: '") + s + "' is not a non-negative integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpilab: divergence-power and entropy-power inequality experiments"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out_dir;
  std::string formats;
  std::string lambda_u, lambda_v, q_ladder;
  std::optional<double> alpha, q;
  std::optional<std::size_t> paths;

  for (auto s : {dpilab::Suite::Alpha, dpilab::Suite::DpiCheck, dpilab::Suite::DpiContinuous, dpilab::Suite::IidSum,
                 dpilab::Suite::Szego, dpilab::Suite::Epi, dpilab::Suite::Cmmse, dpilab::Suite::Full}) {
    auto* sub = app.add_subcommand(std::string(dpilab::suite_name(s)));
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--seed", seed, "root seed (overrides config and DPILAB_SEED)");
    sub->add_option("--jobs", jobs, "concurrent cases")->check(CLI::Range(1u, 256u));
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--format", formats, "comma-separated subset of json,csv");
    if (s == dpilab::Suite::Cmmse) {
      sub->add_option("--lambda-u", lambda_u, "comma-separated eigenvalues of U");
      sub->add_option("--lambda-v", lambda_v, "comma-separated eigenvalues of V");
      sub->add_option("--alpha", alpha, "mixing angle in [0, pi/2]");
      sub->add_option("--q", q, "signal-to-noise parameter");
      sub->add_option("--q-ladder", q_ladder, "comma-separated ascending q values");
      sub->add_option("--paths", paths, "Monte Carlo path count");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dpilab::kExitError;
  }

  const auto* sub = app.get_subcommands().front();
  const auto suite = *dpilab::parse_suite(sub->get_name());

  dpilab::ExperimentConfig config;
  config.suite = suite;
  try {
    dpilab::ConfigDocument doc;
    if (!config_path.empty()) doc = dpilab::load_config_document(config_path);
    if (doc.suite && *doc.suite != suite)
      throw dpilab::ConfigError("suite: config declares '" + std::string(dpilab::suite_name(*doc.suite)) +
                                "' but the command requested '" + sub->get_name() + "'");
    config.cases = doc.cases;

    if (suite == dpilab::Suite::Cmmse && !lambda_u.empty()) {
      Json base = {{"lambda_u", parse_list(lambda_u, "--lambda-u")},
                   {"lambda_v", parse_list(lambda_v.empty() ? lambda_u : lambda_v, "--lambda-v")},
                   {"alpha", alpha.value_or(0.0)}};
      if (q) {
        Json c = base;
        c["check"] = "combination";
        c["name"] = "flags-combination";
        c["q"] = *q;
        config.cases.push_back(c);
      }
      if (!q_ladder.empty()) {
        Json c = base;
        c["check"] = "high-snr";
        c["name"] = "flags-high-snr";
        c["q_ladder"] = parse_list(q_ladder, "--q-ladder");
        config.cases.push_back(c);
      }
      if (paths) {
        Json c = {{"check", "paths"}, {"name", "flags-paths"}, {"lambda", base["lambda_u"][0]},
                  {"q", q.value_or(1.0)}, {"paths", *paths}};
        config.cases.push_back(c);
      }
    }
    if (config_path.empty() && suite != dpilab::Suite::Full && config.cases.empty())
      throw dpilab::ConfigError("--config: required for suite '" + sub->get_name() + "'");

    if (seed) config.seed = *seed;
    else if (doc.seed) config.seed = *doc.seed;
    else if (auto e = env_seed()) config.seed = *e;
    config.jobs = jobs;
    if (doc.tolerance) config.tolerance = *doc.tolerance;
    if (!out_dir.empty()) config.output_dir = out_dir;
    else if (doc.output_dir) config.output_dir = *doc.output_dir;
    if (!formats.empty()) config.formats = dpilab::parse_formats(formats, "--format");
    else if (doc.formats) config.formats = *doc.formats;
  } catch (const std::exception& e) {
    std::cerr << "dpilab: " << e.what() << "\n";
    return dpilab::kExitError;
  }

  const auto outcome = dpilab::run_experiment(config);
  if (outcome.exit_code == dpilab::kExitError) {
    std::cerr << "dpilab: " << outcome.message << "\n";
    return outcome.exit_code;
  }
  for (const auto& c : outcome.report.cases) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
    for (const auto& f : c.failures) std::cout << "  " << f << "\n";
  }
  for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << "\n";
  return outcome.exit_code;
}
