#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpilab/config.hpp"

namespace dpilab {

inline constexpr int kCriteriaCount = 8;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = true;
  std::vector<std::string> details;
  std::vector<std::string> failures;
  // Numerical outcomes; deterministic for a fixed seed.
  Json metrics = Json::object();

  void check(bool ok, const std::string& what);
};

struct BatteryOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
};

std::string criterion_title(int id);

// Criteria 1-7 are property checks; criterion 8 replays 1-7 with the same
// seed and compares the numerical outcomes.
CriterionResult run_criterion(int id, const BatteryOptions& options);
std::vector<CriterionResult> run_battery(const BatteryOptions& options);

// Criterion 8 against already computed results of criteria 1-7.
CriterionResult replay_check(const std::vector<CriterionResult>& first, const BatteryOptions& options);

}  // namespace dpilab
