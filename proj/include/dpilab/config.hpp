#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dpilab/dpi_engine.hpp"
#include "dpilab/scalar_models.hpp"
#include "dpilab/spectra.hpp"
#include "json.hpp"

namespace dpilab {

using Json = nlohmann::json;

// Reads one JSON object, tracking the dotted path for error messages.
// finish() rejects any key that was never asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const;
  const Json& required(const std::string& key);
  const Json* optional(const std::string& key);

  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  std::size_t count(const std::string& key);
  std::size_t count_or(const std::string& key, std::size_t fallback);
  std::string text(const std::string& key);
  std::string text_or(const std::string& key, std::string fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback);

  std::string path_of(const std::string& key) const;
  const std::string& path() const noexcept { return path_; }
  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const Json& j, const std::string& path);
std::vector<double> as_numbers(const Json& j, const std::string& path);

// {"kind": "white", "level": x}
// {"kind": "arma", "ar": [..], "ma": [..], "innovation_variance": x}
// {"kind": "piecewise", "breakpoints": [..], "levels": [..]}
// {"kind": "tabulated", "values": [..]}
SpectralDensity parse_spectrum(const Json& j, const std::string& path);

// {"kind": "gaussian", "variance": x}
// {"kind": "uniform", "half_width": a} or {"kind": "uniform", "variance": x}
// {"kind": "laplace", "scale": b} or {"kind": "laplace", "variance": x}
// {"kind": "mixture", "weights": [..], "means": [..], "variances": [..]}
// {"kind": "grid", "origin": x, "step": h, "values": [..]}
ScalarDistribution parse_distribution(const Json& j, const std::string& path);

// {"statistics": "gaussian", "spectrum": {..}}
// {"statistics": "iid", "marginal": {..}}
// {"statistics": "filtered-iid", "innovation": {..}, "ar": [..], "ma": [..]}
ProcessModel parse_model(const Json& j, const std::string& path);

// {"statistics": "gaussian", "shape": {..}} or {"statistics": "iid", "marginal": {..}}
ContinuousProcessModel parse_continuous_model(const Json& j, double bandwidth, const std::string& path);

enum class Suite { Alpha, DpiCheck, DpiContinuous, IidSum, Szego, Epi, Cmmse, Full };

std::string_view suite_name(Suite s);
std::optional<Suite> parse_suite(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct ExperimentConfig {
  Suite suite = Suite::Full;
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  double tolerance = kEqualityTolerance;
  std::filesystem::path output_dir = "dpilab-out";
  std::vector<std::string> formats{"json", "csv"};
  Json cases = Json::array();
};

// Parsed config document before command-line overrides are applied.
struct ConfigDocument {
  std::optional<Suite> suite;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<std::string> output_dir;
  std::optional<std::vector<std::string>> formats;
  Json cases = Json::array();
};

ConfigDocument parse_config_document(const Json& j);
ConfigDocument load_config_document(const std::filesystem::path& file);
std::vector<std::string> parse_formats(std::string_view list, const std::string& path);

}  // namespace dpilab
