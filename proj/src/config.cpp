#include "dpilab/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dpilab/errors.hpp"

namespace dpilab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

// Re-raises construction errors with the config path attached.
template <class Fn>
auto build(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

}  // namespace

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) fail(path_, "expected an object");
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

std::string ObjectReader::path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

const Json& ObjectReader::required(const std::string& key) {
  seen_.insert(key);
  if (!j_.contains(key)) fail(path_of(key), "required field is missing");
  return j_.at(key);
}

const Json* ObjectReader::optional(const std::string& key) {
  seen_.insert(key);
  return j_.contains(key) ? &j_.at(key) : nullptr;
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::vector<double> as_numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double ObjectReader::number(const std::string& key) { return as_number(required(key), path_of(key)); }

double ObjectReader::number_or(const std::string& key, double fallback) {
  const auto* j = optional(key);
  return j ? as_number(*j, path_of(key)) : fallback;
}

std::size_t ObjectReader::count(const std::string& key) {
  const auto& j = required(key);
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path_of(key), "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::size_t ObjectReader::count_or(const std::string& key, std::size_t fallback) {
  return has(key) ? count(key) : (seen_.insert(key), fallback);
}

std::string ObjectReader::text(const std::string& key) {
  const auto& j = required(key);
  if (!j.is_string()) fail(path_of(key), "expected a string");
  return j.get<std::string>();
}

std::string ObjectReader::text_or(const std::string& key, std::string fallback) {
  return has(key) ? text(key) : (seen_.insert(key), std::move(fallback));
}

std::vector<double> ObjectReader::numbers(const std::string& key) { return as_numbers(required(key), path_of(key)); }

std::vector<double> ObjectReader::numbers_or(const std::string& key, std::vector<double> fallback) {
  const auto* j = optional(key);
  return j ? as_numbers(*j, path_of(key)) : std::move(fallback);
}

void ObjectReader::finish() const {
  for (const auto& [key, value] : j_.items())
    if (!seen_.contains(key)) fail(path_of(key), "unknown field");
}

SpectralDensity parse_spectrum(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto kind = r.text("kind");
  if (kind == "white") {
    const double level = r.number("level");
    r.finish();
    return build(path, [&] { return SpectralDensity::white(level); });
  }
  if (kind == "arma") {
    auto ar = r.numbers_or("ar", {});
    auto ma = r.numbers_or("ma", {});
    const double var = r.number_or("innovation_variance", 1.0);
    r.finish();
    return build(path, [&] { return SpectralDensity::arma(ar, ma, var); });
  }
  if (kind == "piecewise") {
    auto bp = r.numbers("breakpoints");
    auto levels = r.numbers("levels");
    r.finish();
    return build(path, [&] { return SpectralDensity::piecewise(bp, levels); });
  }
  if (kind == "tabulated") {
    auto values = r.numbers("values");
    r.finish();
    return build(path, [&] { return SpectralDensity::tabulated(values); });
  }
  fail(r.path_of("kind"), "unknown spectrum kind '" + kind + "' (white, arma, piecewise, tabulated)");
}

ScalarDistribution parse_distribution(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto kind = r.text("kind");
  auto one_of = [&](const std::string& a, const std::string& b) {
    if (r.has(a) == r.has(b)) fail(path, "exactly one of '" + a + "' or '" + b + "' is required");
    return r.has(a);
  };
  if (kind == "gaussian") {
    const double v = r.number("variance");
    r.finish();
    return build(path, [&] { return ScalarDistribution::gaussian(v); });
  }
  if (kind == "uniform") {
    const bool by_width = one_of("half_width", "variance");
    const double a = by_width ? r.number("half_width") : std::sqrt(3.0 * r.number("variance"));
    r.finish();
    return build(path, [&] { return ScalarDistribution::uniform(a); });
  }
  if (kind == "laplace") {
    const bool by_scale = one_of("scale", "variance");
    const double b = by_scale ? r.number("scale") : std::sqrt(0.5 * r.number("variance"));
    r.finish();
    return build(path, [&] { return ScalarDistribution::laplace(b); });
  }
  if (kind == "mixture") {
    auto w = r.numbers("weights");
    auto m = r.numbers("means");
    auto v = r.numbers("variances");
    r.finish();
    return build(path, [&] { return ScalarDistribution::mixture(w, m, v); });
  }
  if (kind == "grid") {
    const double origin = r.number("origin");
    const double step = r.number("step");
    auto values = r.numbers("values");
    r.finish();
    return build(path, [&] { return ScalarDistribution::grid(origin, step, values); });
  }
  fail(r.path_of("kind"), "unknown distribution kind '" + kind + "' (gaussian, uniform, laplace, mixture, grid)");
}

ProcessModel parse_model(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  const auto stats = r.text("statistics");
  if (stats == "gaussian") {
    auto s = parse_spectrum(r.required("spectrum"), r.path_of("spectrum"));
    r.finish();
    return ProcessModel::gaussian(std::move(s));
  }
  if (stats == "iid") {
    auto p = parse_distribution(r.required("marginal"), r.path_of("marginal"));
    r.finish();
    return ProcessModel::iid(std::move(p));
  }
  if (stats == "filtered-iid") {
    auto p = parse_distribution(r.required("innovation"), r.path_of("innovation"));
    auto ar = r.numbers_or("ar", {});
    auto ma = r.numbers_or("ma", {});
    r.finish();
    return build(path, [&] { return ProcessModel::filtered_iid(std::move(p), ar, ma); });
  }
  fail(r.path_of("statistics"), "unknown statistics '" + stats + "' (gaussian, iid, filtered-iid)");
}

ContinuousProcessModel parse_continuous_model(const Json& j, double bandwidth, const std::string& path) {
  ObjectReader r(j, path);
  const auto stats = r.text("statistics");
  if (stats == "gaussian") {
    auto s = parse_spectrum(r.required("shape"), r.path_of("shape"));
    r.finish();
    return build(path, [&] { return ContinuousProcessModel::gaussian(ContinuousSpectralDensity(bandwidth, s)); });
  }
  if (stats == "iid") {
    auto p = parse_distribution(r.required("marginal"), r.path_of("marginal"));
    r.finish();
    return build(path, [&] { return ContinuousProcessModel::iid(p, bandwidth); });
  }
  fail(r.path_of("statistics"), "unknown statistics '" + stats + "' (gaussian, iid)");
}

std::string_view suite_name(Suite s) {
  switch (s) {
    case Suite::Alpha: return "alpha";
    case Suite::DpiCheck: return "dpi-check";
    case Suite::DpiContinuous: return "dpi-continuous";
    case Suite::IidSum: return "iid-sum";
    case Suite::Szego: return "szego";
    case Suite::Epi: return "epi";
    case Suite::Cmmse: return "cmmse";
    case Suite::Full: return "full";
  }
  return "unknown";
}

std::optional<Suite> parse_suite(std::string_view name) {
  for (auto s : {Suite::Alpha, Suite::DpiCheck, Suite::DpiContinuous, Suite::IidSum, Suite::Szego, Suite::Epi,
                 Suite::Cmmse, Suite::Full})
    if (suite_name(s) == name) return s;
  return std::nullopt;
}

std::vector<std::string> parse_formats(std::string_view list, const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "json" && item != "csv") fail(path, "unknown format '" + item + "' (json, csv)");
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  if (out.empty()) fail(path, "at least one format is required");
  return out;
}

ConfigDocument parse_config_document(const Json& j) {
  ObjectReader r(j, "");
  ConfigDocument doc;
  if (const auto* s = r.optional("suite")) {
    if (!s->is_string()) fail("suite", "expected a string");
    doc.suite = parse_suite(s->get<std::string>());
    if (!doc.suite) fail("suite", "unknown suite '" + s->get<std::string>() + "'");
  }
  if (const auto* s = r.optional("seed")) {
    if (!s->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    doc.seed = s->get<std::uint64_t>();
  }
  if (const auto* t = r.optional("tolerance")) {
    doc.tolerance = as_number(*t, "tolerance");
    if (!(*doc.tolerance > 0.0)) fail("tolerance", "must be positive");
  }
  if (const auto* o = r.optional("output")) {
    ObjectReader out(*o, "output");
    if (out.has("dir")) doc.output_dir = out.text("dir");
    if (const auto* f = out.optional("formats")) {
      if (!f->is_array()) fail("output.formats", "expected an array of strings");
      std::string joined;
      for (std::size_t i = 0; i < f->size(); ++i) {
        if (!(*f)[i].is_string()) fail("output.formats[" + std::to_string(i) + "]", "expected a string");
        joined += (i ? "," : "") + (*f)[i].get<std::string>();
      }
      doc.formats = parse_formats(joined, "output.formats");
    }
    out.finish();
  }
  if (const auto* c = r.optional("cases")) {
    if (!c->is_array()) fail("cases", "expected an array");
    doc.cases = *c;
  }
  r.finish();
  return doc;
}

ConfigDocument load_config_document(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open config file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(file.string() + ": invalid JSON: " + e.what());
  }
  return parse_config_document(j);
}

}  // namespace dpilab
