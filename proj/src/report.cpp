#include "dpilab/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>

#include "dpilab/errors.hpp"

namespace dpilab {

namespace {

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const Json& v) {
  if (v.is_number()) return csv_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

}  // namespace

void CaseResult::check(bool ok, const std::string& what) {
  if (ok) return;
  passed = false;
  failures.push_back(what);
}

bool SuiteReport::passed() const {
  for (const auto& c : cases)
    if (!c.passed) return false;
  return true;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const SuiteReport& report, const std::string& generated_at) {
  Json cases = Json::array();
  for (const auto& c : report.cases) {
    Json tables = Json::array();
    for (const auto& t : c.tables) tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
    cases.push_back({{"name", c.name},
                     {"passed", c.passed},
                     {"failures", c.failures},
                     {"inputs", c.inputs},
                     {"result", c.result},
                     {"tables", tables},
                     {"notes", c.notes}});
  }
  return {{"schema", kReportSchema},
          {"suite", report.suite},
          {"seed", report.seed},
          {"passed", report.passed()},
          {"generated_at", generated_at},
          {"cases", cases}};
}

std::string to_csv(const SuiteReport& report) {
  std::vector<std::string> columns{"case", "passed"};
  for (const auto& c : report.cases)
    for (const auto& [k, v] : c.row)
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i]);
  out += '\n';
  for (const auto& c : report.cases) {
    std::map<std::string, Json> fields(c.row.begin(), c.row.end());
    fields["case"] = c.name;
    fields["passed"] = c.passed;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto it = fields.find(columns[i]);
      out += (i ? "," : "") + (it == fields.end() ? std::string() : csv_field(it->second));
    }
    out += '\n';
  }
  return out;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + csv_field(table.columns[i]);
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_number(row[i]);
    out += '\n';
  }
  return out;
}

Json failure_manifest(const SuiteReport& report) {
  Json failures = Json::array();
  for (const auto& c : report.cases)
    if (!c.passed) failures.push_back({{"case", c.name}, {"violated", c.failures}, {"inputs", c.inputs}});
  return {{"schema", kReportSchema}, {"suite", report.suite}, {"seed", report.seed}, {"failures", failures}};
}

void write_atomic(const std::filesystem::path& file, const std::string& content) {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(file.parent_path().string() + ": output directory is not writable");
    out << content;
    out.flush();
    if (!out) throw ConfigError(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw ConfigError(file.string() + ": rename failed: " + ec.message());
}

std::vector<std::filesystem::path> emit_report(const SuiteReport& report, const std::filesystem::path& dir,
                                               std::span<const std::string> formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError(dir.string() + ": cannot create output directory");
  std::vector<std::filesystem::path> written;
  const std::string base = report.suite;
  for (const auto& f : formats) {
    if (f == "json") {
      const auto path = dir / (base + ".json");
      write_atomic(path, to_json(report, utc_timestamp()).dump(2) + "\n");
      written.push_back(path);
    } else if (f == "csv") {
      const auto path = dir / (base + ".csv");
      write_atomic(path, to_csv(report));
      written.push_back(path);
      for (const auto& c : report.cases)
        for (const auto& t : c.tables) {
          const auto tp = dir / (base + "_" + slug(c.name) + "_" + slug(t.name) + ".csv");
          write_atomic(tp, to_csv(t));
          written.push_back(tp);
        }
    }
  }
  const auto manifest = dir / (base + "_failures.json");
  if (!report.passed()) {
    write_atomic(manifest, failure_manifest(report).dump(2) + "\n");
    written.push_back(manifest);
  } else {
    std::filesystem::remove(manifest, ec);
  }
  return written;
}

}  // namespace dpilab
