#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpilab/scalar_models.hpp"
#include "dpilab/spectra.hpp"

namespace dpilab {

struct GaussianStatistics {};

struct IidStatistics {
  ScalarDistribution marginal;
};

// innovation -> B(z)/A(z), A(z) = 1 - sum a_k z^k, B(z) = 1 + sum b_k z^k.
struct FilteredIidStatistics {
  ScalarDistribution innovation;
  std::vector<double> ar;
  std::vector<double> ma;
};

using ProcessStatistics = std::variant<GaussianStatistics, IidStatistics, FilteredIidStatistics>;

// Discrete-time stationary process with a computable divergence rate from its
// matched Gaussian counterpart. The spectrum is always consistent with the
// statistics: IID => White(variance), FilteredIID => variance * |B/A|^2.
class ProcessModel {
 public:
  static ProcessModel gaussian(SpectralDensity spectrum);
  static ProcessModel iid(ScalarDistribution marginal);
  // Throws InvariantError unless `spectrum` is White(marginal variance).
  static ProcessModel iid(ScalarDistribution marginal, const SpectralDensity& spectrum);
  static ProcessModel filtered_iid(ScalarDistribution innovation, std::vector<double> ar, std::vector<double> ma);

  const SpectralDensity& spectrum() const noexcept { return spectrum_; }
  const ProcessStatistics& statistics() const noexcept { return statistics_; }
  bool is_gaussian() const noexcept { return std::holds_alternative<GaussianStatistics>(statistics_); }
  std::string describe() const;

 private:
  ProcessModel(SpectralDensity spectrum, ProcessStatistics statistics)
      : spectrum_(std::move(spectrum)), statistics_(std::move(statistics)) {}
  SpectralDensity spectrum_;
  ProcessStatistics statistics_;
};

struct MonteCarloOptions {
  std::size_t block_length = 64;
  std::size_t samples = 2000;
  // Importance samples per outer draw for a sum with a Gaussian component.
  std::size_t inner_samples = 512;
  std::uint64_t seed = 0x5eed;
  double z = 1.959963984540054;  // 95% two-sided
  double max_half_width = 0.05;
};

struct MonteCarloEstimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t block_length = 0;
  std::size_t samples = 0;
};

struct DivergenceRate {
  double value = 0.0;
  double half_width = 0.0;
  std::string method;  // closed-form | quadrature | grid | monte-carlo
  std::optional<MonteCarloEstimate> cross_check;
  std::vector<std::string> warnings;
};

// Per-sample divergence rate from the matched Gaussian process.
DivergenceRate divergence_rate(const ProcessModel& model, const MonteCarloOptions& mc = {});

// alpha_i = exp(integral ln(Phi_i / sum_j Phi_j)); requires >= 2 spectra.
std::vector<double> alpha_coefficients(std::span<const SpectralDensity> spectra);

inline constexpr double kEqualityTolerance = 1e-6;

struct InequalityReport {
  double lhs = 0.0;
  std::vector<double> rhs_terms;
  std::vector<double> alphas;
  double margin = 0.0;  // lhs - sum(rhs_terms)
  bool equality = false;
  double tolerance = kEqualityTolerance;
  std::string normalization = "per-sample";
  // Per-term divergence rates and their half-widths; the last entry is the sum.
  std::vector<double> divergences;
  std::vector<double> half_widths;
  // Propagated uncertainty of the margin from estimated divergence rates.
  double margin_half_width = 0.0;
  // True when a term relies on Monte Carlo, so the verdict is soft.
  bool soft = false;
  std::vector<std::string> notes;

  double rhs_total() const;
  bool holds() const { return margin >= -tolerance - margin_half_width; }
};

struct DpiOptions {
  double tolerance = kEqualityTolerance;
  // Sum with one non-Gaussian component and coloured Gaussian components.
  MonteCarloOptions monte_carlo{.block_length = 8, .samples = 400, .inner_samples = 1024};
  // Cross-check of a single filtered-IID term.
  MonteCarloOptions term_monte_carlo{};
  GridOptions grid{};
  // Use the Monte Carlo path even when a grid oracle exists (testing).
  bool force_monte_carlo = false;
};

// Discrete-time divergence-power inequality for independent processes.
DivergenceRate sum_divergence_rate(std::span<const ProcessModel> models, const DpiOptions& options = {});
InequalityReport dpi_check_discrete(std::span<const ProcessModel> models, const DpiOptions& options = {});

enum class Normalization { PerSample, PerTime };
std::string_view to_string(Normalization n);

// Band-limited continuous-time process on [-B, B]. Samples at 2B form a
// discrete ProcessModel with the same statistics.
class ContinuousProcessModel {
 public:
  static ContinuousProcessModel gaussian(ContinuousSpectralDensity spectrum);
  // Flat spectrum on [-B, B] with power equal to the marginal variance times 2B;
  // the 2B-rate samples are i.i.d. with the given marginal.
  static ContinuousProcessModel iid(ScalarDistribution marginal, double bandwidth);

  const ContinuousSpectralDensity& spectrum() const noexcept { return spectrum_; }
  const ProcessModel& sampled() const noexcept { return sampled_; }
  double bandwidth() const noexcept { return spectrum_.bandwidth(); }

 private:
  ContinuousProcessModel(ContinuousSpectralDensity spectrum, ProcessModel sampled)
      : spectrum_(std::move(spectrum)), sampled_(std::move(sampled)) {}
  ContinuousSpectralDensity spectrum_;
  ProcessModel sampled_;
};

struct ContinuousDpiReport {
  InequalityReport per_sample;
  // Present under per-time normalization: each term raised to the power 2B,
  // alphas integrated over [-B, B] and divergence rates per unit time.
  std::optional<InequalityReport> per_time;
  // max |per_time term - per_sample term^(2B)|, relative.
  double scaling_residual = 0.0;
};

ContinuousDpiReport dpi_check_continuous(std::span<const ContinuousProcessModel> models,
                                         Normalization normalization = Normalization::PerSample,
                                         const DpiOptions& options = {});

// True when every pair of spectra is proportional and every model is Gaussian.
bool equality_condition(std::span<const ProcessModel> models);

struct IidSumEntry {
  std::size_t n = 0;
  double divergence = 0.0;
};

struct IidSumSequence {
  std::vector<IidSumEntry> entries;
  // D_N <= D_1 + 1e-9 for every N.
  bool bounded_by_first = true;
};

inline constexpr std::size_t kMaxIidSumTerms = 8;

IidSumSequence iid_sum_divergence_sequence(const ScalarDistribution& p, std::size_t n_max,
                                           const GridOptions& options = {});

}  // namespace dpilab
