#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpilab/config.hpp"

namespace dpilab {

inline constexpr int kReportSchema = 1;

// Plot-ready table; the first column is the x grid (N or q).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CaseResult {
  std::string name;
  bool passed = true;
  // Violated invariants, one line each.
  std::vector<std::string> failures;
  Json inputs = Json::object();
  Json result = Json::object();
  // Flat scalar fields for the one-row-per-case CSV, in column order.
  std::vector<std::pair<std::string, Json>> row;
  std::vector<Table> tables;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what);
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CaseResult> cases;
  bool passed() const;
};

std::string utc_timestamp();

// "generated_at" is the only field outside the determinism contract.
Json to_json(const SuiteReport& report, const std::string& generated_at);
std::string to_csv(const SuiteReport& report);
std::string to_csv(const Table& table);
Json failure_manifest(const SuiteReport& report);

// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& file, const std::string& content);

// Writes <suite>.json and/or <suite>.csv plus <suite>_<case>_<table>.csv.
// Throws ConfigError when the directory cannot be created or written.
std::vector<std::filesystem::path> emit_report(const SuiteReport& report, const std::filesystem::path& dir,
                                               std::span<const std::string> formats);

}  // namespace dpilab
