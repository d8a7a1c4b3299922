#include "dpilab/cmmse_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dpilab/errors.hpp"
#include "dpilab/parallel.hpp"
#include "dpilab/quadrature.hpp"

namespace dpilab {

namespace {

double cos2(double alpha) {
  const double c = std::cos(alpha);
  return c * c;
}

double sin2(double alpha) {
  const double s = std::sin(alpha);
  return s * s;
}

void require_lambdas(std::span<const double> lambda, const char* name) {
  for (double l : lambda)
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError(std::string(name) + ": eigenvalues must be positive");
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2.0)) throw DomainError("alpha must lie in [0, pi/2]");
}

// x - ln(1 + x) without cancellation for small x.
double excess(double x) {
  if (x < 1e-4) return x * x * (0.5 - x * (1.0 / 3.0 - x * 0.25));
  return x - std::log1p(x);
}

double upper_normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

const double kInvSqrtTwoPi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return kInvSqrtTwoPi / std::sqrt(var) * std::exp(-0.5 * d * d / var);
}

// exp(s^2 / 2b^2 - t / b) * erfc((s/b - t/s) / sqrt 2), one half of the
// Laplace-Gaussian convolution.
double laplace_smoothing_term(double t, double b, double s) {
  const double z = (s / b - t / s) / std::numbers::sqrt2;
  if (z < 26.0) return std::exp(0.5 * s * s / (b * b) - t / b) * std::erfc(z);
  const double iz2 = 1.0 / (z * z);
  const double series = 1.0 - iz2 * (0.5 - iz2 * (0.75 - iz2 * 1.875));
  return std::exp(-0.5 * t * t / (s * s)) / (z * std::sqrt(std::numbers::pi)) * series;
}

// Density of V + s * W.
double smoothed_pdf(const ScalarDistribution& p, double s, double y) {
  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return normal_pdf(y, 0.0, law.variance + s * s);
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          const double a = law.half_width;
          const double u = std::abs(y);
          return (upper_normal_tail((u - a) / s) - upper_normal_tail((u + a) / s)) / (2.0 * a);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          const double b = law.scale;
          return (laplace_smoothing_term(y, b, s) + laplace_smoothing_term(-y, b, s)) / (4.0 * b);
        } else if constexpr (std::is_same_v<T, GaussianMixtureLaw>) {
          double v = 0.0;
          for (std::size_t i = 0; i < law.weights.size(); ++i)
            v += law.weights[i] * normal_pdf(y, law.means[i], law.variances[i] + s * s);
          return v;
        } else {
          const double h = law.step;
          const double reach = 12.0 * s + h;
          const auto n = law.values.size();
          const double jlo = std::ceil((y - reach - law.origin) / h);
          const double jhi = std::floor((y + reach - law.origin) / h);
          const auto first = static_cast<std::size_t>(std::max(0.0, jlo));
          const auto last = static_cast<std::size_t>(std::min(static_cast<double>(n) - 1.0, jhi));
          double v = 0.0;
          if (jhi < 0.0 || jlo > static_cast<double>(n) - 1.0) return 0.0;
          for (std::size_t j = first; j <= last; ++j) {
            const double d = y - (law.origin + static_cast<double>(j) * h);
            v += law.values[j] * (upper_normal_tail((d - 0.5 * h) / s) - upper_normal_tail((d + 0.5 * h) / s));
          }
          return v;
        }
      },
      p.representation());
}

std::vector<double> smoothing_breakpoints(const ScalarDistribution& p, double s) {
  const auto [lo0, hi0] = p.support();
  const double lo = lo0 - 12.0 * s;
  const double hi = hi0 + 12.0 * s;
  std::vector<double> pts{lo, hi};
  auto around = [&](double c, double w) {
    for (double k : {0.0, -1.0, 1.0, -4.0, 4.0}) pts.push_back(c + k * w);
  };
  std::visit(
      [&](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, UniformLaw>) {
          around(-law.half_width, s);
          around(law.half_width, s);
        } else if constexpr (std::is_same_v<T, LaplaceLaw>) {
          around(0.0, s);
          around(0.0, law.scale);
        } else if constexpr (std::is_same_v<T, GaussianMixtureLaw>) {
          for (std::size_t i = 0; i < law.means.size(); ++i) around(law.means[i], std::sqrt(law.variances[i] + s * s));
        } else if constexpr (std::is_same_v<T, GridDensity>) {
          for (int k = 1; k < 64; ++k) pts.push_back(lo + (hi - lo) * k / 64.0);
        }
      },
      p.representation());
  std::erase_if(pts, [&](double x) { return x < lo || x > hi; });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

std::vector<double> mix_eigenvalues(std::span<const double> lambda_u, std::span<const double> lambda_v, double alpha) {
  if (lambda_u.size() != lambda_v.size()) throw DomainError("lambda_u and lambda_v must have equal length");
  require_alpha(alpha);
  const double c2 = cos2(alpha);
  const double s2 = sin2(alpha);
  std::vector<double> z(lambda_u.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = lambda_u[i] == lambda_v[i] ? lambda_u[i] : c2 * lambda_u[i] + s2 * lambda_v[i];
  return z;
}

void ChannelConfig::validate() const {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q: must be a positive finite number");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon: must be positive");
  if (steps < kMinChannelSteps) throw DomainError("steps: must be at least 64");
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2.0)) throw DomainError("alpha: must lie in [0, pi/2]");
  if (lambda_u.empty()) throw DomainError("lambda_u: must not be empty");
  if (lambda_u.size() != lambda_v.size()) throw DomainError("lambda_v: length must match lambda_u");
  require_lambdas(lambda_u, "lambda_u");
  require_lambdas(lambda_v, "lambda_v");
}

std::vector<double> ChannelConfig::lambda_z() const { return mix_eigenvalues(lambda_u, lambda_v, alpha); }

double channel_divergence_gaussian(std::span<const double> lambda, double q) {
  if (!(q >= 0.0)) throw DomainError("q must be non-negative");
  require_lambdas(lambda, "lambda");
  double d = 0.0;
  for (double l : lambda) d += excess(q * l);
  return 0.5 * d;
}

CmmseTrajectory gaussian_cmmse_trajectory(double lambda, double q, double horizon, std::size_t steps) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(q >= 0.0)) throw DomainError("q must be non-negative");
  if (steps < kMinChannelSteps) throw DomainError("steps must be at least 64");
  const double dt = horizon / static_cast<double>(steps);
  CmmseTrajectory tr;
  tr.times.resize(steps + 1);
  tr.mmse.resize(steps + 1);
  double p = lambda;
  for (std::size_t k = 0; k <= steps; ++k) {
    tr.times[k] = static_cast<double>(k) * dt;
    tr.mmse[k] = p;
    // one more observation increment of variance dt
    p = p / (1.0 + q * p * dt);
  }
  double integral = 0.0;
  for (std::size_t k = 0; k < steps; ++k) integral += 0.5 * (tr.mmse[k] + tr.mmse[k + 1]) * dt;
  tr.integrated = integral;
  return tr;
}

CombinationReport cmmse_combination_check(std::span<const double> lambda_u, std::span<const double> lambda_v,
                                          double alpha, double q) {
  const auto z = mix_eigenvalues(lambda_u, lambda_v, alpha);
  require_lambdas(lambda_u, "lambda_u");
  require_lambdas(lambda_v, "lambda_v");
  CombinationReport r;
  double su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    r.lhs += std::log1p(q * z[i]);
    su += std::log1p(q * lambda_u[i]);
    sv += std::log1p(q * lambda_v[i]);
  }
  r.rhs = cos2(alpha) * su + sin2(alpha) * sv;
  r.margin = r.lhs - r.rhs;
  r.holds = r.margin >= -r.tolerance;
  return r;
}

CombinationReport divergence_combination_check(std::span<const double> lambda_u, std::span<const double> lambda_v,
                                               double alpha, double q) {
  const auto z = mix_eigenvalues(lambda_u, lambda_v, alpha);
  CombinationReport r;
  r.lhs = channel_divergence_gaussian(z, q);
  r.rhs = cos2(alpha) * channel_divergence_gaussian(lambda_u, q) + sin2(alpha) * channel_divergence_gaussian(lambda_v, q);
  r.margin = r.rhs - r.lhs;
  r.holds = r.margin >= -r.tolerance;
  return r;
}

LimitTable high_snr_limit_check(std::span<const double> lambda_u, std::span<const double> lambda_v, double alpha,
                                std::span<const double> q_ladder) {
  const auto z = mix_eigenvalues(lambda_u, lambda_v, alpha);
  require_lambdas(lambda_u, "lambda_u");
  require_lambdas(lambda_v, "lambda_v");
  if (q_ladder.empty()) throw DomainError("q ladder must not be empty");
  if (!std::is_sorted(q_ladder.begin(), q_ladder.end()) || q_ladder.front() <= 0.0)
    throw DomainError("q ladder must be positive and ascending");
  const double c2 = cos2(alpha);
  const double s2 = sin2(alpha);

  LimitTable t;
  for (std::size_t i = 0; i < z.size(); ++i)
    t.limit += 0.5 * (std::log(z[i]) - c2 * std::log(lambda_u[i]) - s2 * std::log(lambda_v[i]));
  for (double q : q_ladder) {
    // ln(1 + q l) = ln(q l) + ln(1 + 1/(q l)); the ln q parts cancel.
    double diff = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      diff += 0.5 * (std::log1p(1.0 / (q * z[i])) - c2 * std::log1p(1.0 / (q * lambda_u[i])) -
                     s2 * std::log1p(1.0 / (q * lambda_v[i])));
    t.rows.push_back({q, t.limit + diff, t.limit, std::abs(diff), true});
  }
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].gap > t.rows[i - 1].gap) t.gap_decreasing = false;
  if (t.rows.size() >= 2) {
    const double prev = t.rows[t.rows.size() - 2].gap;
    t.tail_ratio = prev > 0.0 ? t.rows.back().gap / prev : 0.0;
  }
  return t;
}

LimitTable scalar_channel_divergence_limit(const ScalarDistribution& p, std::span<const double> q_ladder) {
  if (q_ladder.empty()) throw DomainError("q ladder must not be empty");
  if (!std::is_sorted(q_ladder.begin(), q_ladder.end()) || q_ladder.front() <= 0.0)
    throw DomainError("q ladder must be positive and ascending");
  LimitTable t;
  t.limit = divergence_from_matched_gaussian(p);
  const double mean = p.mean();
  const double var = p.variance();
  for (double q : q_ladder) {
    LimitRow row{q, 0.0, t.limit, t.limit, true};
    if (p.kind() != DistributionKind::Gaussian) {
      // Scaling by 1/sqrt(q) leaves the divergence unchanged.
      const double s = 1.0 / std::sqrt(q);
      const double gvar = var + s * s;
      auto integrand = [&](double y) {
        const double ps = smoothed_pdf(p, s, y);
        if (!(ps > 0.0)) return 0.0;
        const double d = y - mean;
        const double log_g = -0.5 * std::log(2.0 * std::numbers::pi * gvar) - 0.5 * d * d / gvar;
        return ps * (std::log(ps) - log_g);
      };
      const auto pts = smoothing_breakpoints(p, s);
      const auto res = integrate_adaptive(integrand, pts);
      if (!res.converged) {
        row.converged = false;
        row.value = res.value;
        row.gap = std::abs(t.limit - res.value);
        t.rows.push_back(row);
        t.truncated = true;
        t.notes.push_back("quadrature did not converge at q = " + std::to_string(q) + "; ladder truncated");
        break;
      }
      row.value = std::max(0.0, res.value);
      row.gap = std::abs(t.limit - row.value);
    } else {
      row.gap = 0.0;
    }
    t.rows.push_back(row);
  }
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.rows[i].value < t.rows[i - 1].value - 1e-9) t.monotone = false;
    if (t.rows[i].gap > t.rows[i - 1].gap + 1e-9) t.gap_decreasing = false;
  }
  if (t.rows.size() >= 2) {
    const double prev = t.rows[t.rows.size() - 2].gap;
    t.tail_ratio = prev > 0.0 ? t.rows.back().gap / prev : 0.0;
  }
  return t;
}

EpiDemoReport epi_from_cmmse_demo(const ScalarDistribution& p_u, const ScalarDistribution& p_v, double alpha,
                                  const GridOptions& options) {
  require_alpha(alpha);
  const auto hu = differential_entropy_estimate(p_u);
  const auto hv = differential_entropy_estimate(p_v);
  EntropyEstimate hz;
  if (alpha == 0.0) {
    hz = hu;
  } else if (alpha == std::numbers::pi / 2.0) {
    hz = hv;
  } else {
    hz = differential_entropy_estimate(
        convolve(p_u.scaled(std::cos(alpha)), p_v.scaled(std::sin(alpha)), options));
  }
  EpiDemoReport r;
  r.lhs = hz.value;
  r.rhs = cos2(alpha) * hu.value + sin2(alpha) * hv.value;
  r.margin = r.lhs - r.rhs;
  r.half_width = hz.half_width + cos2(alpha) * hu.half_width + sin2(alpha) * hv.half_width;
  r.holds = r.margin >= -r.tolerance - r.half_width;
  return r;
}

PathSimulation simulate_cmmse_paths(double lambda, double q, const PathSimulationOptions& options) {
  if (!(lambda > 0.0) || !(q > 0.0)) throw DomainError("lambda and q must be positive");
  if (options.steps < kMinChannelSteps) throw DomainError("steps must be at least 64");
  if (options.paths < 2 || options.checkpoints == 0 || options.checkpoints > options.steps)
    throw DomainError("path simulation needs at least two paths and 1..steps checkpoints");
  const std::size_t m = options.steps;
  const double dt = options.horizon / static_cast<double>(m);
  const double sq = std::sqrt(q);
  const double sdt = std::sqrt(dt);

  std::vector<std::size_t> check_steps;
  for (std::size_t c = 1; c <= options.checkpoints; ++c) check_steps.push_back(c * m / options.checkpoints);
  const auto traj = gaussian_cmmse_trajectory(lambda, q, options.horizon, m);

  // Fixed chunking so the reduction order is independent of the thread count.
  const std::size_t chunks = std::min<std::size_t>(options.paths, 64);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(check_steps.size(), 0.0));
  parallel_for(chunks, options.jobs, [&](std::size_t chunk) {
    const std::size_t begin = chunk * options.paths / chunks;
    const std::size_t end = (chunk + 1) * options.paths / chunks;
    auto& acc = partial[chunk];
    for (std::size_t path = begin; path < end; ++path) {
      std::mt19937_64 rng(derive_seed(options.seed, path));
      std::normal_distribution<double> normal(0.0, 1.0);
      const double u = std::sqrt(lambda) * normal(rng);
      double xi = 0.0;
      std::size_t next = 0;
      for (std::size_t k = 1; k <= m; ++k) {
        xi += sq * u * dt + sdt * normal(rng);
        if (k == check_steps[next]) {
          const double estimate = traj.mmse[k] * sq * xi;
          const double err = u - estimate;
          acc[next] += err * err;
          if (++next == check_steps.size()) break;
        }
      }
    }
  });

  PathSimulation sim;
  const double n = static_cast<double>(options.paths);
  for (std::size_t c = 0; c < check_steps.size(); ++c) {
    double total = 0.0;
    for (const auto& part : partial) total += part[c];
    const std::size_t k = check_steps[c];
    const double t = traj.times[k];
    const double theory = lambda / (1.0 + q * lambda * t);
    const double se = theory * std::sqrt(2.0 / n);
    sim.times.push_back(t);
    sim.empirical.push_back(total / n);
    sim.theoretical.push_back(theory);
    sim.standard_error.push_back(se);
    if (std::abs(total / n - theory) > options.sigmas * se) sim.within = false;
  }
  return sim;
}

}  // namespace dpilab
