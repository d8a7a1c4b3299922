#include "dpilab/scalar_models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "dpilab/errors.hpp"
#include "dpilab/gaussian_info.hpp"
#include "dpilab/quadrature.hpp"
#include "fft.hpp"

namespace dpilab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kGaussianTailSigmas = 8.0;
const double kLaplaceTailScales = std::log(1.0 / kTailMass);

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double mixture_log_pdf(const GaussianMixtureLaw& m, double x) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(m.weights.size());
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    const double d = x - m.means[k];
    logs[k] = std::log(m.weights[k]) - 0.5 * d * d / m.variances[k] -
              0.5 * std::log(2.0 * std::numbers::pi * m.variances[k]);
    best = std::max(best, logs[k]);
  }
  double s = 0.0;
  for (double l : logs) s += std::exp(l - best);
  return best + std::log(s);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

// Drops outer nodes carrying less than kTailMass in total and renormalizes.
GridDensity trim_and_normalize(GridDensity g) {
  auto& v = g.values;
  for (auto& x : v)
    if (x < 0.0) x = 0.0;
  const double h = g.step;
  std::size_t lo = 0;
  double left = 0.0;
  while (lo < v.size() && left + v[lo] * h < 0.5 * kTailMass) left += v[lo++] * h;
  std::size_t hi = v.size();
  double right = 0.0;
  while (hi > lo + 1 && right + v[hi - 1] * h < 0.5 * kTailMass) right += v[--hi] * h;
  if (lo >= hi) throw NumericalError("grid density has no mass", 0.0);
  std::vector<double> kept(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(hi));
  g.origin += static_cast<double>(lo) * h;
  const double mass = h * std::accumulate(kept.begin(), kept.end(), 0.0);
  if (!(mass > 0.0)) throw NumericalError("grid density has no mass", 0.0);
  for (auto& x : kept) x /= mass;
  g.values = std::move(kept);
  g.renormalization *= 1.0 / mass;
  return g;
}

// Linear interpolation of a grid density onto a new node set.
GridDensity resample(const GridDensity& g, double step) {
  const double width = g.step * static_cast<double>(g.values.size() - 1);
  const auto count = static_cast<std::size_t>(std::ceil(width / step)) + 1;
  GridDensity out{g.origin, step, std::vector<double>(count), g.renormalization};
  for (std::size_t j = 0; j < count; ++j) {
    const double pos = static_cast<double>(j) * step / g.step;
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= g.values.size()) {
      out.values[j] = i < g.values.size() ? g.values[i] : 0.0;
      continue;
    }
    const double t = pos - static_cast<double>(i);
    out.values[j] = (1.0 - t) * g.values[i] + t * g.values[i + 1];
  }
  return trim_and_normalize(std::move(out));
}

// FFT roundoff leaves tiny negative values; they carry no mass.
ScalarDistribution from_grid(GridDensity g) {
  for (auto& v : g.values)
    if (v < 0.0) v = 0.0;
  return ScalarDistribution::grid(g.origin, g.step, std::move(g.values), g.renormalization);
}

std::tuple<int, double, double> canonical_key(const ScalarDistribution& p) {
  return {static_cast<int>(p.kind()), p.variance(), p.mean()};
}

double grid_entropy(const GridDensity& g) {
  double s = 0.0;
  for (double v : g.values)
    if (v > 0.0) s -= v * std::log(v);
  return s * g.step;
}

double mixture_entropy(const GaussianMixtureLaw& m, const ScalarDistribution& p, double* error) {
  std::vector<double> bp;
  const auto [lo, hi] = p.support();
  bp.push_back(lo);
  bp.push_back(hi);
  for (std::size_t k = 0; k < m.means.size(); ++k) {
    const double sd = std::sqrt(m.variances[k]);
    for (double z : {-4.0, -1.0, 0.0, 1.0, 4.0}) {
      const double x = m.means[k] + z * sd;
      if (x > lo && x < hi) bp.push_back(x);
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  QuadratureOptions opts;
  opts.tolerance = 1e-11;
  const auto r = integrate_adaptive(
      [&](double x) {
        const double lp = mixture_log_pdf(m, x);
        const double pv = std::exp(lp);
        return pv > 0.0 ? -pv * lp : 0.0;
      },
      bp, opts);
  if (!r.converged) throw NumericalError("mixture entropy quadrature did not converge", r.error);
  if (error) *error = r.error;
  return r.value;
}

}  // namespace

std::string_view kind_name(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Gaussian: return "gaussian";
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Laplace: return "laplace";
    case DistributionKind::GaussianMixture: return "mixture";
    case DistributionKind::Grid: return "grid";
  }
  return "unknown";
}

ScalarDistribution::ScalarDistribution(Representation rep) : rep_(std::move(rep)) {
  std::visit(overloaded{
                 [this](const GaussianLaw& g) {
                   mean_ = 0.0;
                   variance_ = g.variance;
                 },
                 [this](const UniformLaw& u) {
                   mean_ = 0.0;
                   variance_ = u.half_width * u.half_width / 3.0;
                 },
                 [this](const LaplaceLaw& l) {
                   mean_ = 0.0;
                   variance_ = 2.0 * l.scale * l.scale;
                 },
                 [this](const GaussianMixtureLaw& m) {
                   double mu = 0.0;
                   for (std::size_t k = 0; k < m.weights.size(); ++k) mu += m.weights[k] * m.means[k];
                   double second = 0.0;
                   for (std::size_t k = 0; k < m.weights.size(); ++k)
                     second += m.weights[k] * (m.variances[k] + (m.means[k] - mu) * (m.means[k] - mu));
                   mean_ = mu;
                   variance_ = second;
                 },
                 [this](const GridDensity& g) {
                   double mu = 0.0;
                   for (std::size_t j = 0; j < g.values.size(); ++j)
                     mu += g.values[j] * (g.origin + static_cast<double>(j) * g.step);
                   mu *= g.step;
                   double second = 0.0;
                   for (std::size_t j = 0; j < g.values.size(); ++j) {
                     const double d = g.origin + static_cast<double>(j) * g.step - mu;
                     second += g.values[j] * d * d;
                   }
                   mean_ = mu;
                   variance_ = second * g.step;
                   auto cum = std::make_shared<std::vector<double>>(g.values.size());
                   double acc = 0.0;
                   for (std::size_t j = 0; j < g.values.size(); ++j) {
                     acc += g.values[j] * g.step;
                     (*cum)[j] = acc;
                   }
                   cumulative_ = std::move(cum);
                 },
             },
             rep_);
  if (!(variance_ > 0.0) || !std::isfinite(variance_)) throw DomainError("distribution must have finite positive variance");
}

ScalarDistribution ScalarDistribution::gaussian(double variance) {
  require_positive(variance, "gaussian variance");
  return ScalarDistribution(GaussianLaw{variance});
}

ScalarDistribution ScalarDistribution::uniform(double half_width) {
  require_positive(half_width, "uniform half-width");
  return ScalarDistribution(UniformLaw{half_width});
}

ScalarDistribution ScalarDistribution::laplace(double scale) {
  require_positive(scale, "laplace scale");
  return ScalarDistribution(LaplaceLaw{scale});
}

ScalarDistribution ScalarDistribution::uniform_unit_variance() { return uniform(std::sqrt(3.0)); }
ScalarDistribution ScalarDistribution::laplace_unit_variance() { return laplace(1.0 / std::numbers::sqrt2); }

ScalarDistribution ScalarDistribution::mixture(std::vector<double> weights, std::vector<double> means,
                                               std::vector<double> variances) {
  if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size())
    throw DomainError("mixture: weights, means and variances must be non-empty and of equal length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("mixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture: weights must sum to one");
  for (auto& w : weights) w /= total;
  for (double v : variances) require_positive(v, "mixture component variance");
  for (double m : means)
    if (!std::isfinite(m)) throw DomainError("mixture: means must be finite");
  return ScalarDistribution(GaussianMixtureLaw{std::move(weights), std::move(means), std::move(variances)});
}

ScalarDistribution ScalarDistribution::grid(double origin, double step, std::vector<double> values,
                                            double prior_renormalization) {
  require_positive(step, "grid step");
  if (values.size() < 2) throw DomainError("grid: need at least two values");
  if (!std::isfinite(origin)) throw DomainError("grid: origin must be finite");
  double mass = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("grid: density values must be finite and non-negative");
    mass += v;
  }
  mass *= step;
  if (std::abs(mass - 1.0) > 1e-3) throw DomainError("grid: density must integrate to one, got " + std::to_string(mass));
  GridDensity g{origin, step, std::move(values), prior_renormalization};
  return ScalarDistribution(trim_and_normalize(std::move(g)));
}

double ScalarDistribution::pdf(double x) const {
  return std::visit(overloaded{
                        [x](const GaussianLaw& g) { return normal_pdf(x, 0.0, g.variance); },
                        [x](const UniformLaw& u) { return std::abs(x) <= u.half_width ? 0.5 / u.half_width : 0.0; },
                        [x](const LaplaceLaw& l) { return std::exp(-std::abs(x) / l.scale) / (2.0 * l.scale); },
                        [x](const GaussianMixtureLaw& m) { return std::exp(mixture_log_pdf(m, x)); },
                        [x](const GridDensity& g) {
                          const double pos = (x - g.origin) / g.step;
                          if (pos < 0.0 || pos > static_cast<double>(g.values.size() - 1)) return 0.0;
                          auto i = static_cast<std::size_t>(std::floor(pos));
                          if (i + 1 >= g.values.size()) return g.values.back();
                          const double t = pos - static_cast<double>(i);
                          return (1.0 - t) * g.values[i] + t * g.values[i + 1];
                        },
                    },
                    rep_);
}

double ScalarDistribution::log_pdf(double x) const {
  return std::visit(overloaded{
                        [x](const GaussianLaw& g) {
                          return -0.5 * x * x / g.variance - 0.5 * std::log(2.0 * std::numbers::pi * g.variance);
                        },
                        // Roundoff from an inverse filter must not push an exact
                        // innovation off the support.
                        [x](const UniformLaw& u) {
                          return std::abs(x) <= u.half_width * (1.0 + 1e-9)
                                     ? -std::log(2.0 * u.half_width)
                                     : -std::numeric_limits<double>::infinity();
                        },
                        [x](const LaplaceLaw& l) { return -std::abs(x) / l.scale - std::log(2.0 * l.scale); },
                        [x](const GaussianMixtureLaw& m) { return mixture_log_pdf(m, x); },
                        [this, x](const GridDensity&) { return std::log(pdf(x)); },
                    },
                    rep_);
}

double ScalarDistribution::cdf(double x) const {
  return std::visit(overloaded{
                        [x](const GaussianLaw& g) { return normal_cdf(x / std::sqrt(g.variance)); },
                        [x](const UniformLaw& u) {
                          return std::clamp((x + u.half_width) / (2.0 * u.half_width), 0.0, 1.0);
                        },
                        [x](const LaplaceLaw& l) {
                          return x < 0.0 ? 0.5 * std::exp(x / l.scale) : 1.0 - 0.5 * std::exp(-x / l.scale);
                        },
                        [x](const GaussianMixtureLaw& m) {
                          double c = 0.0;
                          for (std::size_t k = 0; k < m.weights.size(); ++k)
                            c += m.weights[k] * normal_cdf((x - m.means[k]) / std::sqrt(m.variances[k]));
                          return c;
                        },
                        // Cell j is [x_j - step/2, x_j + step/2] with mass step * v_j.
                        [this, x](const GridDensity& g) {
                          const double pos = (x - g.origin) / g.step + 0.5;
                          if (pos <= 0.0) return 0.0;
                          const auto n = g.values.size();
                          if (pos >= static_cast<double>(n)) return 1.0;
                          const auto j = static_cast<std::size_t>(std::floor(pos));
                          const double before = j == 0 ? 0.0 : (*cumulative_)[j - 1];
                          return before + (pos - static_cast<double>(j)) * g.values[j] * g.step;
                        },
                    },
                    rep_);
}

std::pair<double, double> ScalarDistribution::support() const {
  return std::visit(overloaded{
                        [](const GaussianLaw& g) {
                          const double r = kGaussianTailSigmas * std::sqrt(g.variance);
                          return std::pair{-r, r};
                        },
                        [](const UniformLaw& u) { return std::pair{-u.half_width, u.half_width}; },
                        [](const LaplaceLaw& l) {
                          const double r = kLaplaceTailScales * l.scale;
                          return std::pair{-r, r};
                        },
                        [](const GaussianMixtureLaw& m) {
                          double lo = std::numeric_limits<double>::infinity();
                          double hi = -lo;
                          for (std::size_t k = 0; k < m.means.size(); ++k) {
                            const double r = kGaussianTailSigmas * std::sqrt(m.variances[k]);
                            lo = std::min(lo, m.means[k] - r);
                            hi = std::max(hi, m.means[k] + r);
                          }
                          return std::pair{lo, hi};
                        },
                        [](const GridDensity& g) {
                          return std::pair{g.origin, g.origin + g.step * static_cast<double>(g.values.size() - 1)};
                        },
                    },
                    rep_);
}

ScalarDistribution ScalarDistribution::scaled(double c) const {
  if (!(c != 0.0) || !std::isfinite(c)) throw DomainError("scale factor must be finite and non-zero");
  const double a = std::abs(c);
  return std::visit(overloaded{
                        [c](const GaussianLaw& g) { return gaussian(g.variance * c * c); },
                        [a](const UniformLaw& u) { return uniform(u.half_width * a); },
                        [a](const LaplaceLaw& l) { return laplace(l.scale * a); },
                        [c](const GaussianMixtureLaw& m) {
                          auto means = m.means;
                          auto vars = m.variances;
                          for (auto& x : means) x *= c;
                          for (auto& v : vars) v *= c * c;
                          return mixture(m.weights, std::move(means), std::move(vars));
                        },
                        [c, a](const GridDensity& g) {
                          GridDensity out = g;
                          for (auto& v : out.values) v /= a;
                          out.step = g.step * a;
                          if (c > 0.0) {
                            out.origin = g.origin * c;
                          } else {
                            std::reverse(out.values.begin(), out.values.end());
                            out.origin = c * (g.origin + g.step * static_cast<double>(g.values.size() - 1));
                          }
                          return ScalarDistribution(std::move(out));
                        },
                    },
                    rep_);
}

double ScalarDistribution::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(overloaded{
                        [&](const GaussianLaw& g) {
                          return std::normal_distribution<double>(0.0, std::sqrt(g.variance))(rng);
                        },
                        [&](const UniformLaw& u) { return u.half_width * (2.0 * unit(rng) - 1.0); },
                        [&](const LaplaceLaw& l) {
                          const double v = unit(rng) - 0.5;
                          return -l.scale * std::copysign(1.0, v) * std::log1p(-2.0 * std::abs(v));
                        },
                        [&](const GaussianMixtureLaw& m) {
                          std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
                          const auto k = pick(rng);
                          return std::normal_distribution<double>(m.means[k], std::sqrt(m.variances[k]))(rng);
                        },
                        [&](const GridDensity& g) {
                          const double target = unit(rng) * cumulative_->back();
                          const auto it = std::lower_bound(cumulative_->begin(), cumulative_->end(), target);
                          const auto j = static_cast<std::size_t>(it - cumulative_->begin());
                          return g.origin + (static_cast<double>(j) + unit(rng) - 0.5) * g.step;
                        },
                    },
                    rep_);
}

double differential_entropy(const ScalarDistribution& p) { return differential_entropy_estimate(p).value; }

EntropyEstimate differential_entropy_estimate(const ScalarDistribution& p) {
  return std::visit(overloaded{
                        [](const GaussianLaw& g) { return EntropyEstimate{gaussian_entropy(g.variance), 0.0, true}; },
                        [](const UniformLaw& u) { return EntropyEstimate{std::log(2.0 * u.half_width), 0.0, true}; },
                        [](const LaplaceLaw& l) { return EntropyEstimate{1.0 + std::log(2.0 * l.scale), 0.0, true}; },
                        [&p](const GaussianMixtureLaw& m) {
                          double err = 0.0;
                          const double h = mixture_entropy(m, p, &err);
                          return EntropyEstimate{h, std::max(err, 1e-9), false};
                        },
                        [](const GridDensity& g) {
                          const double h = grid_entropy(g);
                          // Richardson-style budget from the grid at twice the step.
                          GridDensity coarse{g.origin, 2.0 * g.step, {}, 1.0};
                          double mass = 0.0;
                          for (std::size_t j = 0; j < g.values.size(); j += 2) {
                            coarse.values.push_back(g.values[j]);
                            mass += g.values[j];
                          }
                          mass *= coarse.step;
                          for (auto& v : coarse.values) v /= mass;
                          const double hc = grid_entropy(coarse);
                          return EntropyEstimate{h, std::max(std::abs(h - hc) / 3.0, 1e-12), false};
                        },
                    },
                    p.representation());
}

double divergence_from_matched_gaussian(const ScalarDistribution& p) {
  if (p.kind() == DistributionKind::Gaussian) return 0.0;
  const double d = gaussian_entropy(p.variance()) - differential_entropy(p);
  return d < 0.0 ? 0.0 : d;
}

double divergence_from_gaussian(const ScalarDistribution& p, double variance) {
  if (!(variance > 0.0)) throw DomainError("divergence_from_gaussian: variance must be positive");
  const double d = gaussian_entropy(variance) - differential_entropy(p);
  return d < 0.0 ? 0.0 : d;
}

GridDensity discretize(const ScalarDistribution& p, double origin, double step, std::size_t count) {
  GridDensity g{origin, step, std::vector<double>(count), 1.0};
  const bool cell_average = p.kind() == DistributionKind::Uniform || p.kind() == DistributionKind::Laplace;
  if (const auto* src = std::get_if<GridDensity>(&p.representation())) {
    if (std::abs(src->step - step) <= 1e-12 * step) {
      const double shift = (src->origin - origin) / step;
      const auto offset = static_cast<long>(std::llround(shift));
      for (std::size_t j = 0; j < src->values.size(); ++j) {
        const long k = static_cast<long>(j) + offset;
        if (k >= 0 && static_cast<std::size_t>(k) < count) g.values[static_cast<std::size_t>(k)] = src->values[j];
      }
      g.renormalization = src->renormalization;
    } else {
      for (std::size_t j = 0; j < count; ++j) g.values[j] = p.pdf(origin + static_cast<double>(j) * step);
      g.renormalization = src->renormalization;
    }
  } else if (cell_average) {
    double prev = p.cdf(origin - 0.5 * step);
    for (std::size_t j = 0; j < count; ++j) {
      const double next = p.cdf(origin + (static_cast<double>(j) + 0.5) * step);
      g.values[j] = (next - prev) / step;
      prev = next;
    }
  } else {
    for (std::size_t j = 0; j < count; ++j) g.values[j] = p.pdf(origin + static_cast<double>(j) * step);
  }
  double mass = step * std::accumulate(g.values.begin(), g.values.end(), 0.0);
  if (!(mass > 0.0)) throw NumericalError("discretization captured no mass", 0.0);
  for (auto& v : g.values) v /= mass;
  g.renormalization *= 1.0 / mass;
  return g;
}

ScalarDistribution convolve(const ScalarDistribution& p, const ScalarDistribution& q, const GridOptions& options) {
  const std::vector<ScalarDistribution> both{p, q};
  return convolve_all(both, options);
}

ScalarDistribution convolve_all(std::span<const ScalarDistribution> inputs, const GridOptions& options) {
  if (inputs.empty()) throw DomainError("convolve: no inputs");
  std::vector<ScalarDistribution> items(inputs.begin(), inputs.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return canonical_key(a) < canonical_key(b); });

  std::vector<double> widths;
  std::vector<double> lows;
  double grid_step = std::numeric_limits<double>::infinity();
  for (const auto& it : items) {
    const auto [lo, hi] = it.support();
    widths.push_back(hi - lo);
    lows.push_back(lo);
    if (const auto* g = std::get_if<GridDensity>(&it.representation())) grid_step = std::min(grid_step, g->step);
  }
  std::sort(widths.begin(), widths.end());
  std::sort(lows.begin(), lows.end());
  const double total_width = std::accumulate(widths.begin(), widths.end(), 0.0);
  double step = total_width / static_cast<double>(options.points - 1);
  if (std::isfinite(grid_step) && total_width / grid_step + 1.0 <= static_cast<double>(options.max_points))
    step = std::min(step, grid_step);

  std::vector<GridDensity> grids;
  std::size_t out_len = 1;
  double renorm = 1.0;
  for (const auto& it : items) {
    const auto [lo, hi] = it.support();
    GridDensity g;
    const auto* src = std::get_if<GridDensity>(&it.representation());
    if (src && std::abs(src->step - step) > 1e-12 * step) {
      g = resample(*src, step);
    } else {
      const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9)) + 1;
      g = discretize(it, lo, step, count);
    }
    renorm *= g.renormalization;
    out_len += g.values.size() - 1;
    grids.push_back(std::move(g));
  }
  if (out_len > options.max_points)
    throw NumericalError("convolution grid exceeds the point cap of " + std::to_string(options.max_points),
                         static_cast<double>(out_len));
  if (grids.size() == 1) return from_grid(std::move(grids.front()));

  const std::size_t fft_len = detail::next_pow2(out_len);
  std::vector<std::complex<double>> product;
  for (const auto& g : grids) {
    std::vector<double> padded(fft_len, 0.0);
    std::copy(g.values.begin(), g.values.end(), padded.begin());
    auto spectrum = detail::rfft(padded);
    if (product.empty()) {
      product = std::move(spectrum);
    } else {
      for (std::size_t k = 0; k < product.size(); ++k) product[k] *= spectrum[k];
    }
  }
  auto values = detail::irfft(product, fft_len);
  values.resize(out_len);
  const double factor = std::pow(step, static_cast<double>(grids.size() - 1));
  for (auto& v : values) v *= factor;

  double origin = 0.0;
  for (const auto& g : grids) origin += g.origin;
  GridDensity out{origin, step, std::move(values), renorm};
  return from_grid(std::move(out));
}

ScalarDistribution normalized_iid_sum(const ScalarDistribution& p, std::size_t n, const GridOptions& options) {
  if (n == 0) throw DomainError("normalized_iid_sum: N must be >= 1");
  if (n == 1) return p;
  const auto [lo, hi] = p.support();
  GridDensity base;
  if (const auto* src = std::get_if<GridDensity>(&p.representation())) {
    base = *src;
  } else {
    const double step = static_cast<double>(n) * (hi - lo) / static_cast<double>(options.points - 1);
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9)) + 1;
    base = discretize(p, lo, step, count);
  }
  const std::size_t out_len = n * (base.values.size() - 1) + 1;
  if (out_len > options.max_points)
    throw NumericalError("iid-sum grid exceeds the point cap of " + std::to_string(options.max_points),
                         static_cast<double>(out_len));
  const std::size_t fft_len = detail::next_pow2(out_len);
  std::vector<double> padded(fft_len, 0.0);
  std::copy(base.values.begin(), base.values.end(), padded.begin());
  auto spectrum = detail::rfft(padded);
  for (auto& c : spectrum) {
    std::complex<double> acc{1.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) acc *= c;
    c = acc;
  }
  auto values = detail::irfft(spectrum, fft_len);
  values.resize(out_len);
  const double factor = std::pow(base.step, static_cast<double>(n - 1));
  for (auto& v : values) v *= factor;
  GridDensity sum{static_cast<double>(n) * base.origin, base.step, std::move(values),
                  std::pow(base.renormalization, static_cast<double>(n))};
  const ScalarDistribution unscaled = from_grid(std::move(sum));
  return unscaled.scaled(1.0 / std::sqrt(static_cast<double>(n)));
}

}  // namespace dpilab
