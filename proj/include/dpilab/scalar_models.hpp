#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace dpilab {

struct GaussianLaw {
  double variance = 1.0;
};

// Uniform on [-half_width, half_width].
struct UniformLaw {
  double half_width = 1.0;
};

// Density exp(-|x|/scale) / (2 scale).
struct LaplaceLaw {
  double scale = 1.0;
};

struct GaussianMixtureLaw {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
};

// Density samples on x_j = origin + j * step. Integrals over a grid density
// are Riemann sums step * sum_j g(x_j); pdf() interpolates linearly.
struct GridDensity {
  double origin = 0.0;
  double step = 1.0;
  std::vector<double> values;
  // Factor applied to restore unit mass after discretization and tail
  // truncation (1 when nothing was lost).
  double renormalization = 1.0;
};

enum class DistributionKind { Gaussian, Uniform, Laplace, GaussianMixture, Grid };

std::string_view kind_name(DistributionKind kind);

// Tail mass dropped when a support is truncated for discretization.
inline constexpr double kTailMass = 1e-12;

struct GridOptions {
  std::size_t points = std::size_t{1} << 14;
  std::size_t max_points = std::size_t{1} << 20;
};

// One-dimensional probability law with finite variance.
class ScalarDistribution {
 public:
  using Representation = std::variant<GaussianLaw, UniformLaw, LaplaceLaw, GaussianMixtureLaw, GridDensity>;

  static ScalarDistribution gaussian(double variance);
  static ScalarDistribution uniform(double half_width);
  static ScalarDistribution laplace(double scale);
  static ScalarDistribution mixture(std::vector<double> weights, std::vector<double> means,
                                    std::vector<double> variances);
  // Values must be non-negative with step * sum within 1e-3 of one; the
  // table is renormalized to unit mass.
  static ScalarDistribution grid(double origin, double step, std::vector<double> values,
                                 double prior_renormalization = 1.0);

  static ScalarDistribution uniform_unit_variance();
  static ScalarDistribution laplace_unit_variance();

  const Representation& representation() const noexcept { return rep_; }
  DistributionKind kind() const noexcept { return static_cast<DistributionKind>(rep_.index()); }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;

  // Interval carrying all but kTailMass of the probability.
  std::pair<double, double> support() const;

  // Law of c * X, c != 0.
  ScalarDistribution scaled(double c) const;

  double sample(std::mt19937_64& rng) const;

 private:
  explicit ScalarDistribution(Representation rep);
  Representation rep_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::shared_ptr<const std::vector<double>> cumulative_;  // grid only
};

struct EntropyEstimate {
  double value = 0.0;
  double half_width = 0.0;  // quadrature/grid error budget
  bool closed_form = false;
};

// -integral p ln p, in nats.
double differential_entropy(const ScalarDistribution& p);
EntropyEstimate differential_entropy_estimate(const ScalarDistribution& p);

// D(p || N(mean, variance)) = h(matched Gaussian) - h(p), clamped at zero.
double divergence_from_matched_gaussian(const ScalarDistribution& p);

// h(N(0, variance)) - h(p), clamped at zero. For sums computed on a grid the
// exact variance is known and is more accurate than the grid moments.
double divergence_from_gaussian(const ScalarDistribution& p, double variance);

// Discretizes p on x_j = origin + j * step, j < count: point samples for
// continuous laws, cell averages for the uniform and Laplace laws; then
// renormalizes to unit mass.
GridDensity discretize(const ScalarDistribution& p, double origin, double step, std::size_t count);

// Density of X + Y for independent X ~ p, Y ~ q, on a common FFT grid.
ScalarDistribution convolve(const ScalarDistribution& p, const ScalarDistribution& q, const GridOptions& options = {});

// Density of the sum of all independent inputs. Inputs are put in a
// canonical order first, so the result does not depend on argument order.
ScalarDistribution convolve_all(std::span<const ScalarDistribution> inputs, const GridOptions& options = {});

// Law of (X_1 + ... + X_n) / sqrt(n) for i.i.d. X_i ~ p.
ScalarDistribution normalized_iid_sum(const ScalarDistribution& p, std::size_t n, const GridOptions& options = {});

}  // namespace dpilab
