#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dpilab/config.hpp"
#include "dpilab/report.hpp"

namespace dpilab {

enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitAssertion = 2 };

struct RunOutcome {
  int exit_code = kExitPass;
  SuiteReport report;
  std::vector<std::filesystem::path> files;
  // Error text for exit code 1.
  std::string message;
};

// Validates every case, runs them (up to config.jobs concurrently), and
// writes the report files. Exit code 0 when every asserted property holds,
// 2 on an assertion failure (a failure manifest is written), 1 on config or
// numerical errors.
RunOutcome run_experiment(const ExperimentConfig& config);

// Validation and execution without writing files. Throws on config or
// numerical errors.
SuiteReport run_suite(const ExperimentConfig& config);

// Parses all cases of a suite into runnable closures; throws ConfigError
// naming the offending field. The argument of each closure is the case seed.
std::vector<std::function<CaseResult(std::uint64_t)>> parse_cases(Suite suite, const Json& cases, double tolerance);

}  // namespace dpilab
