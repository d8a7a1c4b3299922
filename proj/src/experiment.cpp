#include "dpilab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "dpilab/battery.hpp"
#include "dpilab/cmmse_channel.hpp"
#include "dpilab/dpi_engine.hpp"
#include "dpilab/epi_engine.hpp"
#include "dpilab/errors.hpp"
#include "dpilab/parallel.hpp"
#include "dpilab/toeplitz.hpp"

namespace dpilab {

namespace {

using CaseFn = std::function<CaseResult(std::uint64_t)>;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

Json inequality_json(const InequalityReport& r) {
  return {{"lhs", r.lhs},
          {"rhs_terms", r.rhs_terms},
          {"alphas", r.alphas},
          {"margin", r.margin},
          {"margin_half_width", r.margin_half_width},
          {"equality", r.equality},
          {"tolerance", r.tolerance},
          {"normalization", r.normalization},
          {"divergences", r.divergences},
          {"half_widths", r.half_widths},
          {"soft", r.soft},
          {"holds", r.holds()},
          {"notes", r.notes}};
}

Eigen::MatrixXd parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = as_numbers(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    if (static_cast<Eigen::Index>(row.size()) != n) fail(path, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
  }
  return m;
}

std::vector<double> ladder(ObjectReader& r, const std::string& key) {
  auto q = r.numbers(key);
  if (q.empty() || q.front() <= 0.0 || !std::is_sorted(q.begin(), q.end()))
    fail(r.path_of(key), "must be a non-empty ascending list of positive numbers");
  return q;
}

// "expect": {"dotted.key": [value, tolerance]}
using Expectations = std::vector<std::tuple<std::string, double, double>>;

Expectations parse_expect(ObjectReader& r) {
  Expectations out;
  const auto* e = r.optional("expect");
  if (!e) return out;
  const auto path = r.path_of("expect");
  if (!e->is_object()) fail(path, "expected an object");
  for (const auto& [key, v] : e->items()) {
    const auto pair = as_numbers(v, path + "." + key);
    if (pair.size() != 2 || pair[1] < 0.0) fail(path + "." + key, "expected [value, tolerance]");
    out.emplace_back(key, pair[0], pair[1]);
  }
  return out;
}

void apply_expect(CaseResult& c, const Expectations& ex) {
  for (const auto& [key, value, tol] : ex) {
    const Json* node = &c.result;
    std::size_t pos = 0;
    bool found = true;
    while (found) {
      const auto dot = key.find('.', pos);
      const auto part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (!node->is_object() || !node->contains(part)) {
        found = false;
        break;
      }
      node = &node->at(part);
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
    if (!found || !node->is_number()) {
      c.check(false, "expect." + key + ": no numeric result field with this name");
      continue;
    }
    const double got = node->get<double>();
    c.check(std::abs(got - value) <= tol,
            "expect." + key + ": got " + std::to_string(got) + ", expected " + std::to_string(value) + " +/- " +
                std::to_string(tol));
  }
}

std::vector<SpectralDensity> spectra_list(ObjectReader& r, const std::string& key) {
  const auto& arr = r.required(key);
  const auto path = r.path_of(key);
  if (!arr.is_array() || arr.size() < 2) fail(path, "expected an array of at least two entries");
  std::vector<SpectralDensity> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_spectrum(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<ProcessModel> model_list(ObjectReader& r) {
  const auto& arr = r.required("models");
  const auto path = r.path_of("models");
  if (!arr.is_array() || arr.size() < 2) fail(path, "expected an array of at least two models");
  std::vector<ProcessModel> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_model(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

MonteCarloOptions parse_monte_carlo(ObjectReader& r, MonteCarloOptions base) {
  const auto* j = r.optional("monte_carlo");
  if (!j) return base;
  ObjectReader m(*j, r.path_of("monte_carlo"));
  base.block_length = m.count_or("block_length", base.block_length);
  base.samples = m.count_or("samples", base.samples);
  base.inner_samples = m.count_or("inner_samples", base.inner_samples);
  m.finish();
  if (base.block_length < 1 || base.samples < 2 || base.inner_samples < 1)
    fail(r.path_of("monte_carlo"), "block_length >= 1, samples >= 2 and inner_samples >= 1 are required");
  return base;
}

CaseFn alpha_case(ObjectReader& r) {
  auto spectra = spectra_list(r, "spectra");
  return [spectra](std::uint64_t) {
    CaseResult c;
    const auto a = alpha_coefficients(spectra);
    double sum = 0.0;
    for (double v : a) sum += v;
    bool prop = true;
    for (std::size_t i = 1; i < spectra.size(); ++i) prop = prop && proportional(spectra[i], spectra[0]);
    c.result = {{"alphas", a}, {"sum", sum}, {"proportional", prop}};
    for (std::size_t i = 0; i < a.size(); ++i) {
      c.check(a[i] > 0.0 && a[i] <= 1.0, "alpha[" + std::to_string(i) + "] outside (0, 1]");
      c.row.emplace_back("alpha_" + std::to_string(i), a[i]);
    }
    c.row.emplace_back("alpha_sum", sum);
    c.row.emplace_back("proportional", prop);
    c.check(sum <= 1.0 + 1e-9, "sum of alphas exceeds 1 + 1e-9");
    c.check((std::abs(sum - 1.0) <= 1e-6) == prop, "sum of alphas equals 1 exactly when spectra are proportional");
    return c;
  };
}

CaseFn dpi_case(ObjectReader& r, double tolerance) {
  auto models = model_list(r);
  DpiOptions base;
  base.tolerance = r.number_or("tolerance", tolerance);
  base.monte_carlo = parse_monte_carlo(r, base.monte_carlo);
  return [models, base](std::uint64_t seed) {
    DpiOptions o = base;
    o.monte_carlo.seed = derive_seed(seed, 1);
    o.term_monte_carlo.seed = derive_seed(seed, 2);
    const auto rep = dpi_check_discrete(models, o);
    CaseResult c;
    c.result = inequality_json(rep);
    c.notes = rep.notes;
    c.row = {{"lhs", rep.lhs}, {"rhs_total", rep.rhs_total()}, {"margin", rep.margin},
             {"equality", rep.equality}, {"soft", rep.soft}};
    c.check(rep.holds(), "inequality margin " + std::to_string(rep.margin) + " below -tolerance");
    return c;
  };
}

CaseFn continuous_case(ObjectReader& r, double tolerance) {
  const double band = r.number("bandwidth");
  if (!(band > 0.0)) fail(r.path_of("bandwidth"), "must be positive");
  const auto norm_text = r.text_or("normalization", "per-sample");
  Normalization norm;
  if (norm_text == "per-sample") norm = Normalization::PerSample;
  else if (norm_text == "per-time") norm = Normalization::PerTime;
  else fail(r.path_of("normalization"), "expected 'per-sample' or 'per-time'");
  const auto& arr = r.required("models");
  const auto path = r.path_of("models");
  if (!arr.is_array() || arr.size() < 2) fail(path, "expected an array of at least two models");
  std::vector<ContinuousProcessModel> models;
  for (std::size_t i = 0; i < arr.size(); ++i)
    models.push_back(parse_continuous_model(arr[i], band, path + "[" + std::to_string(i) + "]"));
  DpiOptions base;
  base.tolerance = r.number_or("tolerance", tolerance);
  return [models, norm, base](std::uint64_t seed) {
    DpiOptions o = base;
    o.monte_carlo.seed = derive_seed(seed, 1);
    o.term_monte_carlo.seed = derive_seed(seed, 2);
    const auto rep = dpi_check_continuous(models, norm, o);
    CaseResult c;
    c.result = {{"per_sample", inequality_json(rep.per_sample)}};
    c.notes = rep.per_sample.notes;
    c.row = {{"per_sample_margin", rep.per_sample.margin}, {"per_sample_equality", rep.per_sample.equality}};
    c.check(rep.per_sample.holds(), "per-sample margin " + std::to_string(rep.per_sample.margin) + " below -tolerance");
    if (rep.per_time) {
      c.result["per_time"] = inequality_json(*rep.per_time);
      c.result["scaling_residual"] = rep.scaling_residual;
      c.notes = rep.per_time->notes;
      c.row.emplace_back("per_time_margin", rep.per_time->margin);
      c.row.emplace_back("per_time_equality", rep.per_time->equality);
      c.row.emplace_back("scaling_residual", rep.scaling_residual);
      c.check(rep.scaling_residual <= 1e-9, "per-time terms differ from per-sample terms to the power 2B");
    }
    return c;
  };
}

CaseFn iid_sum_case(ObjectReader& r) {
  auto p = parse_distribution(r.required("distribution"), r.path_of("distribution"));
  const auto n_max = r.count_or("n_max", 6);
  if (n_max < 1 || n_max > kMaxIidSumTerms) fail(r.path_of("n_max"), "must be in [1, 8]");
  return [p, n_max](std::uint64_t) {
    const auto seq = iid_sum_divergence_sequence(p, n_max);
    CaseResult c;
    Table t{"divergence", {"N", "divergence"}, {}};
    Json entries = Json::array();
    for (const auto& e : seq.entries) {
      t.rows.push_back({static_cast<double>(e.n), e.divergence});
      entries.push_back({{"n", e.n}, {"divergence", e.divergence}});
    }
    c.result = {{"entries", entries}, {"d1", seq.entries.front().divergence}, {"bounded_by_first", seq.bounded_by_first}};
    c.row = {{"n_max", n_max}, {"d1", seq.entries.front().divergence}, {"d_last", seq.entries.back().divergence},
             {"bounded_by_first", seq.bounded_by_first}};
    c.tables.push_back(std::move(t));
    c.check(seq.bounded_by_first, "D_N exceeds D_1 + 1e-9");
    return c;
  };
}

CaseFn szego_case(ObjectReader& r, unsigned jobs) {
  auto s = parse_spectrum(r.required("spectrum"), r.path_of("spectrum"));
  std::vector<std::size_t> sizes;
  for (double v : r.numbers("sizes")) {
    if (v < 1 || v > static_cast<double>(kMaxToeplitzDimension) || v != std::floor(v))
      fail(r.path_of("sizes"), "sizes must be integers in [1, 2048]");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.empty() || !std::is_sorted(sizes.begin(), sizes.end()))
    fail(r.path_of("sizes"), "must be a non-empty ascending list");
  return [s, sizes, jobs](std::uint64_t) {
    const auto rows = szego_convergence_table(s, sizes, jobs);
    CaseResult c;
    Table t{"szego", {"N", "mean_log_eigenvalue", "limit", "gap"}, {}};
    Json out = Json::array();
    double max_gap = 0.0;
    for (const auto& row : rows) {
      t.rows.push_back({static_cast<double>(row.n), row.mean_log_eigenvalue, row.limit, row.gap});
      out.push_back({{"n", row.n}, {"mean_log_eigenvalue", row.mean_log_eigenvalue}, {"limit", row.limit}, {"gap", row.gap}});
      max_gap = std::max(max_gap, row.gap);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].gap < rows[i - 1].gap;
    const bool exact = max_gap <= 1e-10;
    c.result = {{"rows", out}, {"limit", rows.front().limit}, {"strictly_decreasing", decreasing}, {"exact", exact}};
    c.row = {{"sizes", rows.size()}, {"limit", rows.front().limit}, {"last_gap", rows.back().gap},
             {"strictly_decreasing", decreasing}};
    c.tables.push_back(std::move(t));
    c.check(decreasing || exact, "gap column is not strictly decreasing");
    return c;
  };
}

CaseFn epi_case(ObjectReader& r) {
  const auto mode = r.text("mode");
  if (mode == "gaussian") {
    const auto x = parse_matrix(r.required("cov_x"), r.path_of("cov_x"));
    const auto y = parse_matrix(r.required("cov_y"), r.path_of("cov_y"));
    if (x.rows() != y.rows()) fail(r.path_of("cov_y"), "dimension differs from cov_x");
    return [x, y](std::uint64_t) {
      const auto m = epi_margin_gaussian(x, y);
      const auto f = divergence_form_equivalence(x, y, 0.0, 0.0, 0.0);
      CaseResult c;
      c.result = {{"mode", "gaussian"},   {"entropy_power_sum", m.sum}, {"entropy_power_x", m.x},
                  {"entropy_power_y", m.y}, {"margin", m.margin},      {"divergence_form_margin", f.margin},
                  {"prefactor_residual", f.prefactor_residual}, {"correspondence_residual", f.correspondence_residual}};
      c.row = {{"mode", "gaussian"}, {"margin", m.margin}, {"divergence_form_margin", f.margin}};
      c.check(m.margin >= -1e-9 * m.sum, "EPI margin negative");
      c.check(f.consistent, "entropy and divergence forms disagree");
      return c;
    };
  }
  if (mode == "scalar") {
    auto x = parse_distribution(r.required("x"), r.path_of("x"));
    auto y = parse_distribution(r.required("y"), r.path_of("y"));
    return [x, y](std::uint64_t) {
      const auto m = epi_margin_scalar(x, y);
      CaseResult c;
      c.result = {{"mode", "scalar"},        {"entropy_power_sum", m.sum}, {"entropy_power_x", m.x},
                  {"entropy_power_y", m.y}, {"margin", m.margin},       {"half_width", m.half_width}};
      c.row = {{"mode", "scalar"}, {"margin", m.margin}, {"half_width", m.half_width}};
      c.check(m.margin >= -kScalarEpiTolerance - m.half_width, "EPI margin below the scalar tolerance budget");
      return c;
    };
  }
  fail(r.path_of("mode"), "expected 'gaussian' or 'scalar'");
}

CaseFn cmmse_case(ObjectReader& r, unsigned jobs) {
  const auto check = r.text("check");
  if (check == "combination") {
    ChannelConfig cfg;
    cfg.lambda_u = r.numbers("lambda_u");
    cfg.lambda_v = r.numbers("lambda_v");
    cfg.alpha = r.number("alpha");
    cfg.q = r.number("q");
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      fail(r.path(), e.what());
    }
    return [cfg](std::uint64_t) {
      const auto a = cmmse_combination_check(cfg.lambda_u, cfg.lambda_v, cfg.alpha, cfg.q);
      const auto b = divergence_combination_check(cfg.lambda_u, cfg.lambda_v, cfg.alpha, cfg.q);
      CaseResult c;
      c.result = {{"cmmse", {{"lhs", a.lhs}, {"rhs", a.rhs}, {"margin", a.margin}, {"holds", a.holds}}},
                  {"divergence", {{"lhs", b.lhs}, {"rhs", b.rhs}, {"margin", b.margin}, {"holds", b.holds}}}};
      c.row = {{"cmmse_lhs", a.lhs}, {"cmmse_rhs", a.rhs}, {"divergence_lhs", b.lhs}, {"divergence_rhs", b.rhs}};
      c.check(a.holds, "CMMSE combination inequality violated");
      c.check(b.holds, "divergence combination inequality violated");
      return c;
    };
  }
  if (check == "high-snr") {
    auto lu = r.numbers("lambda_u");
    auto lv = r.numbers("lambda_v");
    const double alpha = r.number("alpha");
    auto q = ladder(r, "q_ladder");
    ChannelConfig cfg{1.0, 1.0, 4096, alpha, lu, lv};
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      fail(r.path(), e.what());
    }
    return [lu, lv, alpha, q](std::uint64_t) {
      const auto t = high_snr_limit_check(lu, lv, alpha, q);
      CaseResult c;
      Table tab{"high_snr", {"q", "value", "limit", "gap"}, {}};
      Json rows = Json::array();
      for (const auto& row : t.rows) {
        tab.rows.push_back({row.q, row.value, row.limit, row.gap});
        rows.push_back({{"q", row.q}, {"value", row.value}, {"gap", row.gap}});
      }
      c.result = {{"limit", t.limit}, {"rows", rows}, {"gap_decreasing", t.gap_decreasing}, {"tail_ratio", t.tail_ratio}};
      c.row = {{"limit", t.limit}, {"last_gap", t.rows.back().gap}, {"tail_ratio", t.tail_ratio}};
      c.tables.push_back(std::move(tab));
      c.check(t.gap_decreasing, "gap does not decrease along the ladder");
      return c;
    };
  }
  if (check == "scalar-limit") {
    auto p = parse_distribution(r.required("distribution"), r.path_of("distribution"));
    auto q = ladder(r, "q_ladder");
    return [p, q](std::uint64_t) {
      const auto t = scalar_channel_divergence_limit(p, q);
      CaseResult c;
      Table tab{"scalar_limit", {"q", "divergence", "limit", "gap", "converged"}, {}};
      Json rows = Json::array();
      for (const auto& row : t.rows) {
        tab.rows.push_back({row.q, row.value, row.limit, row.gap, row.converged ? 1.0 : 0.0});
        rows.push_back({{"q", row.q}, {"divergence", row.value}, {"gap", row.gap}, {"converged", row.converged}});
      }
      c.result = {{"limit", t.limit}, {"rows", rows}, {"monotone", t.monotone}, {"truncated", t.truncated}};
      c.row = {{"limit", t.limit}, {"last_value", t.rows.back().value}, {"monotone", t.monotone},
               {"truncated", t.truncated}};
      c.notes = t.notes;
      c.tables.push_back(std::move(tab));
      c.check(t.monotone, "divergence decreases along the ladder");
      c.check(!t.truncated, "ladder truncated after a quadrature failure");
      return c;
    };
  }
  if (check == "trajectory") {
    const double lambda = r.number("lambda");
    const double q = r.number("q");
    const double horizon = r.number_or("horizon", 1.0);
    const auto steps = r.count_or("steps", 4096);
    if (!(lambda > 0.0) || !(q > 0.0) || !(horizon > 0.0) || steps < kMinChannelSteps)
      fail(r.path(), "lambda, q, horizon must be positive and steps >= 64");
    return [lambda, q, horizon, steps](std::uint64_t) {
      const auto tr = gaussian_cmmse_trajectory(lambda, q, horizon, steps);
      const double exact = std::log1p(q * lambda * horizon) / q;
      const double bridge = 0.5 * q * (lambda * horizon - tr.integrated);
      const double channel = channel_divergence_gaussian(std::vector<double>{lambda * horizon}, q);
      CaseResult c;
      Table tab{"trajectory", {"t", "cmmse"}, {}};
      const std::size_t stride = std::max<std::size_t>(1, steps / 256);
      for (std::size_t k = 0; k < tr.times.size(); k += stride) tab.rows.push_back({tr.times[k], tr.mmse[k]});
      c.result = {{"integrated", tr.integrated}, {"closed_form", exact}, {"bridge", bridge}, {"channel_divergence", channel}};
      c.row = {{"integrated", tr.integrated}, {"closed_form", exact}, {"bridge", bridge}, {"channel_divergence", channel}};
      c.tables.push_back(std::move(tab));
      c.check(std::abs(tr.integrated - exact) <= 1e-3, "integrated CMMSE differs from (1/q) ln(1 + q lambda T)");
      if (horizon == 1.0) c.check(std::abs(bridge - channel) <= 1e-3, "divergence-CMMSE bridge differs");
      return c;
    };
  }
  if (check == "paths") {
    const double lambda = r.number("lambda");
    const double q = r.number("q");
    PathSimulationOptions po;
    po.paths = r.count_or("paths", po.paths);
    po.steps = r.count_or("steps", po.steps);
    po.horizon = r.number_or("horizon", po.horizon);
    po.checkpoints = r.count_or("checkpoints", po.checkpoints);
    po.jobs = jobs;
    if (!(lambda > 0.0) || !(q > 0.0) || po.paths < 2 || po.steps < kMinChannelSteps || po.checkpoints < 1 ||
        po.checkpoints > po.steps)
      fail(r.path(), "lambda, q positive; paths >= 2; steps >= 64; 1 <= checkpoints <= steps");
    return [lambda, q, po](std::uint64_t seed) {
      auto o = po;
      o.seed = seed;
      const auto sim = simulate_cmmse_paths(lambda, q, o);
      CaseResult c;
      Table tab{"paths", {"t", "empirical", "theoretical", "standard_error"}, {}};
      for (std::size_t i = 0; i < sim.times.size(); ++i)
        tab.rows.push_back({sim.times[i], sim.empirical[i], sim.theoretical[i], sim.standard_error[i]});
      c.result = {{"times", sim.times}, {"empirical", sim.empirical}, {"theoretical", sim.theoretical},
                  {"standard_error", sim.standard_error}, {"within", sim.within}};
      c.row = {{"paths", o.paths}, {"within", sim.within}};
      c.tables.push_back(std::move(tab));
      c.check(sim.within, "empirical CMMSE outside 3 standard errors");
      return c;
    };
  }
  if (check == "demo") {
    auto u = parse_distribution(r.required("u"), r.path_of("u"));
    auto v = parse_distribution(r.required("v"), r.path_of("v"));
    const double alpha = r.number("alpha");
    if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2.0)) fail(r.path_of("alpha"), "must lie in [0, pi/2]");
    return [u, v, alpha](std::uint64_t) {
      const auto d = epi_from_cmmse_demo(u, v, alpha);
      CaseResult c;
      c.result = {{"lhs", d.lhs}, {"rhs", d.rhs}, {"margin", d.margin}, {"half_width", d.half_width}, {"holds", d.holds}};
      c.row = {{"lhs", d.lhs}, {"rhs", d.rhs}, {"margin", d.margin}};
      c.check(d.holds, "entropy combination inequality violated");
      return c;
    };
  }
  fail(r.path_of("check"), "unknown check '" + check + "' (combination, high-snr, scalar-limit, trajectory, paths, demo)");
}

SuiteReport run_full(const ExperimentConfig& config) {
  SuiteReport report;
  report.suite = "full";
  report.seed = config.seed;
  const auto results = run_battery({config.seed, config.jobs});
  for (const auto& cr : results) {
    CaseResult c;
    c.name = "criterion-" + std::to_string(cr.id);
    c.passed = cr.passed;
    c.failures = cr.failures;
    c.inputs = {{"criterion", cr.id}, {"seed", config.seed}};
    c.result = {{"title", cr.title}, {"details", cr.details}, {"metrics", cr.metrics}};
    c.row = {{"criterion", cr.id}, {"title", cr.title}};
    report.cases.push_back(std::move(c));
  }
  return report;
}

}  // namespace

std::vector<CaseFn> parse_cases(Suite suite, const Json& cases, double tolerance) {
  if (!cases.is_array()) fail("cases", "expected an array");
  std::vector<CaseFn> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string path = "cases[" + std::to_string(i) + "]";
    ObjectReader r(cases[i], path);
    const auto name = r.text_or("name", "case-" + std::to_string(i));
    const auto expect = parse_expect(r);
    CaseFn fn;
    switch (suite) {
      case Suite::Alpha: fn = alpha_case(r); break;
      case Suite::DpiCheck: fn = dpi_case(r, tolerance); break;
      case Suite::DpiContinuous: fn = continuous_case(r, tolerance); break;
      case Suite::IidSum: fn = iid_sum_case(r); break;
      case Suite::Szego: fn = szego_case(r, 1); break;
      case Suite::Epi: fn = epi_case(r); break;
      case Suite::Cmmse: fn = cmmse_case(r, 1); break;
      case Suite::Full: fail(path, "the full suite takes no cases");
    }
    r.finish();
    const Json inputs = cases[i];
    out.push_back([fn, name, expect, inputs](std::uint64_t seed) {
      CaseResult c = fn(seed);
      c.name = name;
      c.inputs = inputs;
      apply_expect(c, expect);
      return c;
    });
  }
  return out;
}

SuiteReport run_suite(const ExperimentConfig& config) {
  if (config.suite == Suite::Full) {
    if (!config.cases.empty()) fail("cases", "the full suite takes no cases");
    return run_full(config);
  }
  const auto fns = parse_cases(config.suite, config.cases, config.tolerance);
  if (fns.empty()) fail("cases", "at least one case is required");
  SuiteReport report;
  report.suite = std::string(suite_name(config.suite));
  report.seed = config.seed;
  report.cases.resize(fns.size());
  parallel_for(fns.size(), config.jobs, [&](std::size_t i) { report.cases[i] = fns[i](derive_seed(config.seed, i)); });
  return report;
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  RunOutcome out;
  try {
    out.report = run_suite(config);
    out.files = emit_report(out.report, config.output_dir, config.formats);
    out.exit_code = out.report.passed() ? kExitPass : kExitAssertion;
  } catch (const std::exception& e) {
    out.exit_code = kExitError;
    out.message = e.what();
  }
  return out;
}

}  // namespace dpilab
