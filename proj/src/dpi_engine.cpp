#include "dpilab/dpi_engine.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "dpilab/errors.hpp"
#include "dpilab/gaussian_info.hpp"
#include "dpilab/parallel.hpp"

namespace dpilab {

namespace {

const double kLogTwoPi = std::log(2.0 * std::numbers::pi);

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double log_mean_exp(const std::vector<double>& logs) {
  double best = -std::numeric_limits<double>::infinity();
  for (double l : logs) best = std::max(best, l);
  if (!std::isfinite(best)) return best;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - best);
  return best + std::log(s / static_cast<double>(logs.size()));
}

// Impulse response h_0..h_{n-1} of B(z)/A(z), h_0 = 1.
std::vector<double> impulse_response(std::span<const double> ar, std::span<const double> ma, std::size_t n) {
  std::vector<double> h(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double v = k == 0 ? 1.0 : (k <= ma.size() ? ma[k - 1] : 0.0);
    for (std::size_t j = 1; j <= ar.size() && j <= k; ++j) v += ar[j - 1] * h[k - j];
    h[k] = v;
  }
  return h;
}

Eigen::MatrixXd lower_toeplitz(const std::vector<double>& h) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = h[static_cast<std::size_t>(i - j)];
  return m;
}

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double standard_error() const {
    const double m = mean();
    const double var = (sum_sq - static_cast<double>(count) * m * m) / static_cast<double>(count - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
  }
};

// E_p[ln p(X) - ln g(X)] / N for a block of N samples of the filter started
// at rest. The exact block density comes from inverting the filter (unit
// diagonal, so no Jacobian); the matched Gaussian uses a Cholesky factor of
// sigma^2 L L^T formed independently.
MonteCarloEstimate filtered_block_divergence(const FilteredIidStatistics& stats, const MonteCarloOptions& mc) {
  const std::size_t n = mc.block_length;
  const double var = stats.innovation.variance();
  const auto h = impulse_response(stats.ar, stats.ma, n);
  const Eigen::MatrixXd l = lower_toeplitz(h);
  const Eigen::MatrixXd cov = var * l * l.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("block covariance is not positive definite", 0.0);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();

  std::mt19937_64 rng(mc.seed);
  MeanAccumulator acc;
  std::vector<double> e(n), x(n), rec(n);
  for (std::size_t s = 0; s < mc.samples; ++s) {
    for (auto& v : e) v = stats.innovation.sample(rng);
    for (std::size_t t = 0; t < n; ++t) {
      double v = e[t];
      for (std::size_t k = 1; k <= stats.ma.size() && k <= t; ++k) v += stats.ma[k - 1] * e[t - k];
      for (std::size_t k = 1; k <= stats.ar.size() && k <= t; ++k) v += stats.ar[k - 1] * x[t - k];
      x[t] = v;
    }
    double log_p = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double v = x[t];
      for (std::size_t k = 1; k <= stats.ar.size() && k <= t; ++k) v -= stats.ar[k - 1] * x[t - k];
      for (std::size_t k = 1; k <= stats.ma.size() && k <= t; ++k) v -= stats.ma[k - 1] * rec[t - k];
      rec[t] = v;
      log_p += stats.innovation.log_pdf(v);
    }
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
    const double quad = xv.dot(llt.solve(xv));
    const double log_g = -0.5 * quad - 0.5 * log_det - 0.5 * static_cast<double>(n) * kLogTwoPi;
    acc.add((log_p - log_g) / static_cast<double>(n));
  }
  return MonteCarloEstimate{acc.mean(), mc.z * acc.standard_error(), n, mc.samples};
}

// Sum S = L e + G of one non-Gaussian component (innovations e, filter L) and
// independent Gaussian components with Toeplitz covariance C. ln p_S(s) is
// estimated by defensive importance sampling: half the proposals come from
// the Gaussian-approximation posterior of e given s, half from the prior.
MonteCarloEstimate mixed_sum_block_divergence(const ScalarDistribution& innovation, std::span<const double> ar,
                                              std::span<const double> ma, const std::vector<SpectralDensity>& gaussians,
                                              const MonteCarloOptions& mc) {
  const std::size_t n = mc.block_length;
  const auto ni = static_cast<Eigen::Index>(n);
  const double var = innovation.variance();
  const Eigen::MatrixXd l = lower_toeplitz(impulse_response(ar, ma, n));

  std::vector<double> r(n, 0.0);
  for (const auto& g : gaussians) {
    const auto rg = autocovariance(g, n);
    for (std::size_t k = 0; k < n; ++k) r[k] += rg[k];
  }
  Eigen::MatrixXd c(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) c(i, j) = r[static_cast<std::size_t>(std::abs(i - j))];

  Eigen::LLT<Eigen::MatrixXd> llt_c(c);
  if (llt_c.info() != Eigen::Success) throw NumericalError("Gaussian component covariance is not PD", 0.0);
  const double log_det_c = 2.0 * llt_c.matrixLLT().diagonal().array().log().sum();
  const Eigen::MatrixXd cov_s = var * l * l.transpose() + c;
  Eigen::LLT<Eigen::MatrixXd> llt_s(cov_s);
  const double log_det_s = 2.0 * llt_s.matrixLLT().diagonal().array().log().sum();

  const Eigen::MatrixXd c_inv_l = llt_c.solve(l);
  const Eigen::MatrixXd precision = l.transpose() * c_inv_l + Eigen::MatrixXd::Identity(ni, ni) / var;
  Eigen::LLT<Eigen::MatrixXd> llt_post(precision);
  const Eigen::MatrixXd post_l = llt_post.matrixL();
  const double log_det_post_half = llt_post.matrixLLT().diagonal().array().log().sum();
  const double half_n_log2pi = 0.5 * static_cast<double>(n) * kLogTwoPi;
  const Eigen::MatrixXd chol_c = llt_c.matrixL();

  std::mt19937_64 rng(mc.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MeanAccumulator acc;
  Eigen::VectorXd e(ni), z(ni), s(ni), cand(ni), resid(ni);
  std::vector<double> log_w(mc.inner_samples);
  for (std::size_t outer = 0; outer < mc.samples; ++outer) {
    for (Eigen::Index t = 0; t < ni; ++t) e(t) = innovation.sample(rng);
    for (Eigen::Index t = 0; t < ni; ++t) z(t) = normal(rng);
    s = l * e + chol_c * z;

    const Eigen::VectorXd post_mean = llt_post.solve(c_inv_l.transpose() * s);
    for (std::size_t k = 0; k < mc.inner_samples; ++k) {
      if (unit(rng) < 0.5) {
        for (Eigen::Index t = 0; t < ni; ++t) z(t) = normal(rng);
        cand = post_mean + post_l.transpose().triangularView<Eigen::Upper>().solve(z);
      } else {
        for (Eigen::Index t = 0; t < ni; ++t) cand(t) = innovation.sample(rng);
      }
      double log_prior = 0.0;
      for (Eigen::Index t = 0; t < ni; ++t) log_prior += innovation.log_pdf(cand(t));
      if (!std::isfinite(log_prior)) {
        log_w[k] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const Eigen::VectorXd dev = post_l.transpose() * (cand - post_mean);
      const double log_post = -0.5 * dev.squaredNorm() + log_det_post_half - half_n_log2pi;
      const double log_q = std::log(0.5) + std::max(log_post, log_prior) +
                           std::log1p(std::exp(-std::abs(log_post - log_prior)));
      resid = s - l * cand;
      const double log_lik = -0.5 * resid.dot(llt_c.solve(resid)) - 0.5 * log_det_c - half_n_log2pi;
      log_w[k] = log_prior + log_lik - log_q;
    }
    const double log_p = log_mean_exp(log_w);
    const double log_g = -0.5 * s.dot(llt_s.solve(s)) - 0.5 * log_det_s - half_n_log2pi;
    acc.add((log_p - log_g) / static_cast<double>(n));
  }
  return MonteCarloEstimate{acc.mean(), mc.z * acc.standard_error(), n, mc.samples};
}

DivergenceRate marginal_rate(const ScalarDistribution& p) {
  DivergenceRate rate;
  if (p.kind() == DistributionKind::Gaussian) {
    rate.method = "closed-form";
    return rate;
  }
  const auto h = differential_entropy_estimate(p);
  rate.value = std::max(0.0, gaussian_entropy(p.variance()) - h.value);
  rate.half_width = h.half_width;
  rate.method = h.closed_form ? "closed-form" : (p.kind() == DistributionKind::Grid ? "grid" : "quadrature");
  return rate;
}

std::optional<ScalarDistribution> iid_marginal(const ProcessModel& m) {
  if (const auto* iid = std::get_if<IidStatistics>(&m.statistics())) return iid->marginal;
  if (m.is_gaussian()) {
    if (const auto* w = std::get_if<White>(&m.spectrum().representation()))
      return ScalarDistribution::gaussian(w->level);
  }
  return std::nullopt;
}

}  // namespace

ProcessModel ProcessModel::gaussian(SpectralDensity spectrum) {
  return ProcessModel(std::move(spectrum), GaussianStatistics{});
}

ProcessModel ProcessModel::iid(ScalarDistribution marginal) {
  auto spectrum = SpectralDensity::white(marginal.variance());
  return ProcessModel(std::move(spectrum), IidStatistics{std::move(marginal)});
}

ProcessModel ProcessModel::iid(ScalarDistribution marginal, const SpectralDensity& spectrum) {
  const auto* w = std::get_if<White>(&spectrum.representation());
  if (!w || std::abs(w->level - marginal.variance()) > 1e-9 * marginal.variance())
    throw InvariantError("IID process must have a white spectrum equal to the marginal variance");
  return iid(std::move(marginal));
}

ProcessModel ProcessModel::filtered_iid(ScalarDistribution innovation, std::vector<double> ar, std::vector<double> ma) {
  auto spectrum = SpectralDensity::arma(ar, ma, innovation.variance());
  return ProcessModel(std::move(spectrum), FilteredIidStatistics{std::move(innovation), std::move(ar), std::move(ma)});
}

std::string ProcessModel::describe() const {
  if (is_gaussian()) return "gaussian";
  if (const auto* iid = std::get_if<IidStatistics>(&statistics_))
    return "iid " + std::string(kind_name(iid->marginal.kind()));
  const auto& f = std::get<FilteredIidStatistics>(statistics_);
  return "filtered-iid " + std::string(kind_name(f.innovation.kind()));
}

DivergenceRate divergence_rate(const ProcessModel& model, const MonteCarloOptions& mc) {
  if (model.is_gaussian()) return DivergenceRate{0.0, 0.0, "closed-form", std::nullopt, {}};
  if (const auto* iid = std::get_if<IidStatistics>(&model.statistics())) return marginal_rate(iid->marginal);
  const auto& f = std::get<FilteredIidStatistics>(model.statistics());
  // An invertible causal filter with unit leading coefficient is a volume
  // preserving bijection of each block, so the rate is the innovation's.
  DivergenceRate rate = marginal_rate(f.innovation);
  rate.cross_check = filtered_block_divergence(f, mc);
  if (rate.cross_check->half_width > mc.max_half_width)
    rate.warnings.push_back("Monte Carlo half-width " + fmt(rate.cross_check->half_width) + " exceeds requested " +
                            fmt(mc.max_half_width));
  return rate;
}

std::vector<double> alpha_coefficients(std::span<const SpectralDensity> spectra) {
  if (spectra.size() < 2) throw DomainError("alpha_coefficients: need at least two spectra");
  std::vector<double> alphas;
  alphas.reserve(spectra.size());
  for (const auto& s : spectra) alphas.push_back(std::exp(log_ratio_integral(s, spectra)));
  return alphas;
}

double InequalityReport::rhs_total() const {
  double t = 0.0;
  for (double r : rhs_terms) t += r;
  return t;
}

bool equality_condition(std::span<const ProcessModel> models) {
  for (const auto& m : models)
    if (!m.is_gaussian()) return false;
  for (std::size_t i = 1; i < models.size(); ++i)
    if (!proportional(models[i].spectrum(), models[0].spectrum())) return false;
  return true;
}

DivergenceRate sum_divergence_rate(std::span<const ProcessModel> models, const DpiOptions& options) {
  const bool all_gaussian = std::all_of(models.begin(), models.end(), [](const auto& m) { return m.is_gaussian(); });
  if (all_gaussian) return DivergenceRate{0.0, 0.0, "closed-form", std::nullopt, {}};

  const auto non_gaussian = static_cast<std::size_t>(
      std::count_if(models.begin(), models.end(), [](const auto& m) { return !m.is_gaussian(); }));

  std::vector<ScalarDistribution> marginals;
  for (const auto& m : models) {
    if (auto p = iid_marginal(m)) marginals.push_back(std::move(*p));
  }
  if (marginals.size() == models.size() && !(options.force_monte_carlo && non_gaussian == 1)) {
    const auto sum = convolve_all(marginals, options.grid);
    // Grid moments rather than the exact variance: the grid entropy and
    // variance carry matching discretization errors that largely cancel.
    auto rate = marginal_rate(sum);
    rate.method = "grid";
    return rate;
  }

  if (non_gaussian != 1)
    throw CapabilityError(
        "no divergence-rate oracle for this sum: " + std::to_string(non_gaussian) +
        " non-Gaussian models with a filtered or coloured component; supported sums are all-Gaussian, "
        "all-IID (white Gaussian counts as IID), or exactly one non-Gaussian model");

  const auto it = std::find_if(models.begin(), models.end(), [](const auto& m) { return !m.is_gaussian(); });
  std::vector<SpectralDensity> gaussians;
  for (const auto& m : models)
    if (m.is_gaussian()) gaussians.push_back(m.spectrum());

  MonteCarloEstimate est;
  if (const auto* iid = std::get_if<IidStatistics>(&it->statistics())) {
    est = mixed_sum_block_divergence(iid->marginal, {}, {}, gaussians, options.monte_carlo);
  } else {
    const auto& f = std::get<FilteredIidStatistics>(it->statistics());
    est = mixed_sum_block_divergence(f.innovation, f.ar, f.ma, gaussians, options.monte_carlo);
  }
  DivergenceRate rate;
  rate.value = std::max(0.0, est.value);
  rate.half_width = est.half_width;
  rate.method = "monte-carlo";
  rate.cross_check = est;
  if (est.half_width > options.monte_carlo.max_half_width)
    rate.warnings.push_back("Monte Carlo half-width " + fmt(est.half_width) + " exceeds requested " +
                            fmt(options.monte_carlo.max_half_width));
  return rate;
}

namespace {

InequalityReport assemble(double sum_rate, double sum_hw, std::span<const double> rates, std::span<const double> hws,
                          std::vector<double> alphas, double tolerance) {
  InequalityReport r;
  r.tolerance = tolerance;
  r.alphas = std::move(alphas);
  r.lhs = std::exp(-2.0 * sum_rate);
  r.margin_half_width = 2.0 * r.lhs * sum_hw;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double term = r.alphas[i] * std::exp(-2.0 * rates[i]);
    r.rhs_terms.push_back(term);
    r.margin_half_width += 2.0 * term * hws[i];
    r.divergences.push_back(rates[i]);
    r.half_widths.push_back(hws[i]);
  }
  r.divergences.push_back(sum_rate);
  r.half_widths.push_back(sum_hw);
  r.margin = r.lhs - r.rhs_total();
  r.equality = std::abs(r.margin) <= tolerance;
  return r;
}

}  // namespace

InequalityReport dpi_check_discrete(std::span<const ProcessModel> models, const DpiOptions& options) {
  if (models.size() < 2) throw DomainError("dpi_check: need at least two models");
  std::vector<SpectralDensity> spectra;
  for (const auto& m : models) spectra.push_back(m.spectrum());
  auto alphas = alpha_coefficients(spectra);

  std::vector<double> rates, hws;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto rate = divergence_rate(models[i], options.term_monte_carlo);
    rates.push_back(rate.value);
    hws.push_back(rate.half_width);
    std::string note = "term[" + std::to_string(i) + "] " + models[i].describe() + ": " + rate.method;
    if (rate.half_width > 0.0) note += " +/- " + fmt(rate.half_width);
    if (rate.cross_check)
      note += "; monte-carlo cross-check " + fmt(rate.cross_check->value) + " +/- " + fmt(rate.cross_check->half_width) +
              " (N=" + std::to_string(rate.cross_check->block_length) + ")";
    notes.push_back(std::move(note));
    for (const auto& w : rate.warnings) notes.push_back("warning: " + w);
  }
  const auto sum = sum_divergence_rate(models, options);
  std::string sum_note = "sum: " + sum.method;
  if (sum.half_width > 0.0) sum_note += " +/- " + fmt(sum.half_width);
  if (sum.method == "monte-carlo")
    sum_note += " (block N=" + std::to_string(sum.cross_check->block_length) + ", soft verdict)";
  notes.push_back(std::move(sum_note));
  for (const auto& w : sum.warnings) notes.push_back("warning: " + w);

  auto report = assemble(sum.value, sum.half_width, rates, hws, std::move(alphas), options.tolerance);
  report.soft = sum.method == "monte-carlo";
  const bool structural = equality_condition(models);
  if (structural != report.equality)
    notes.push_back(std::string("equality flag disagrees with the Gaussian-proportional condition (condition ") +
                    (structural ? "met" : "not met") + ")");
  report.notes = std::move(notes);
  return report;
}

std::string_view to_string(Normalization n) { return n == Normalization::PerSample ? "per-sample" : "per-time"; }

ContinuousProcessModel ContinuousProcessModel::gaussian(ContinuousSpectralDensity spectrum) {
  auto sampled = ProcessModel::gaussian(sample_bandlimited(spectrum));
  return ContinuousProcessModel(std::move(spectrum), std::move(sampled));
}

ContinuousProcessModel ContinuousProcessModel::iid(ScalarDistribution marginal, double bandwidth) {
  ContinuousSpectralDensity spectrum(bandwidth, SpectralDensity::white(marginal.variance() / (2.0 * bandwidth)));
  auto sampled = ProcessModel::iid(std::move(marginal), sample_bandlimited(spectrum));
  return ContinuousProcessModel(std::move(spectrum), std::move(sampled));
}

ContinuousDpiReport dpi_check_continuous(std::span<const ContinuousProcessModel> models, Normalization normalization,
                                         const DpiOptions& options) {
  if (models.size() < 2) throw DomainError("dpi_check_continuous: need at least two models");
  const double band = models.front().bandwidth();
  for (const auto& m : models)
    if (m.bandwidth() != band) throw DomainError("dpi_check_continuous: bandwidth mismatch between models");

  std::vector<ProcessModel> sampled;
  for (const auto& m : models) sampled.push_back(m.sampled());
  ContinuousDpiReport out{dpi_check_discrete(sampled, options), std::nullopt, 0.0};
  out.per_sample.normalization = std::string(to_string(Normalization::PerSample));
  if (normalization == Normalization::PerSample) return out;

  // Per unit time: 2B samples per second and alpha integrals over [-B, B].
  const double rate_scale = 2.0 * band;
  std::vector<ContinuousSpectralDensity> spectra;
  for (const auto& m : models) spectra.push_back(m.spectrum());
  std::vector<double> alphas;
  for (const auto& s : spectra) alphas.push_back(std::exp(log_ratio_integral(s, spectra)));

  const auto& ps = out.per_sample;
  const std::size_t k = models.size();
  std::vector<double> rates(k), hws(k);
  for (std::size_t i = 0; i < k; ++i) {
    rates[i] = rate_scale * ps.divergences[i];
    hws[i] = rate_scale * ps.half_widths[i];
  }
  auto pt = assemble(rate_scale * ps.divergences[k], rate_scale * ps.half_widths[k], rates, hws, std::move(alphas),
                     options.tolerance);
  pt.normalization = std::string(to_string(Normalization::PerTime));
  pt.soft = ps.soft;
  pt.notes = ps.notes;
  pt.notes.push_back("per-time terms: alphas integrated over [-B, B], divergence rates scaled by 2B = " +
                     fmt(rate_scale));
  if (pt.margin < -pt.tolerance)
    pt.notes.push_back("per-time form violated (margin " + fmt(pt.margin) + ", 2B = " + fmt(rate_scale) + ")");

  double residual = std::abs(pt.lhs - std::pow(ps.lhs, rate_scale)) / std::max(1e-300, std::abs(pt.lhs));
  for (std::size_t i = 0; i < k; ++i) {
    const double expect = std::pow(ps.rhs_terms[i], rate_scale);
    residual = std::max(residual, std::abs(pt.rhs_terms[i] - expect) / std::max(1e-300, std::abs(expect)));
  }
  out.scaling_residual = residual;
  out.per_time = std::move(pt);
  return out;
}

IidSumSequence iid_sum_divergence_sequence(const ScalarDistribution& p, std::size_t n_max, const GridOptions& options) {
  if (n_max == 0 || n_max > kMaxIidSumTerms) throw DomainError("iid_sum: N_max must be in [1, 8]");
  IidSumSequence seq;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double d = divergence_from_matched_gaussian(normalized_iid_sum(p, n, options));
    seq.entries.push_back({n, d});
  }
  const double first = seq.entries.front().divergence;
  for (const auto& e : seq.entries)
    if (e.divergence > first + 1e-9) seq.bounded_by_first = false;
  return seq;
}

}  // namespace dpilab
