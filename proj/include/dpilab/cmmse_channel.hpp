#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpilab/scalar_models.hpp"

namespace dpilab {

// White Gaussian channel xi(t) = w(t) + sqrt(q) * int_0^t signal, with the
// signal made of independent constant-in-time modes. U and V share the mode
// basis, so z = U cos(alpha) + V sin(alpha) has eigenvalues
// cos^2 * lambda_u + sin^2 * lambda_v.
struct ChannelConfig {
  double q = 1.0;
  double horizon = 1.0;
  std::size_t steps = 4096;
  double alpha = 0.0;
  std::vector<double> lambda_u;
  std::vector<double> lambda_v;

  // Throws DomainError naming the offending field.
  void validate() const;
  std::vector<double> lambda_z() const;
};

inline constexpr std::size_t kMinChannelSteps = 64;

std::vector<double> mix_eigenvalues(std::span<const double> lambda_u, std::span<const double> lambda_v, double alpha);

// (1/2) sum [q lambda - ln(1 + q lambda)].
double channel_divergence_gaussian(std::span<const double> lambda, double q);

struct CmmseTrajectory {
  std::vector<double> times;
  std::vector<double> mmse;
  double integrated = 0.0;
};

// Causal MMSE of a constant Gaussian amplitude with variance lambda,
// observed through the channel on `steps` uniform increments over [0, T].
CmmseTrajectory gaussian_cmmse_trajectory(double lambda, double q, double horizon = 1.0, std::size_t steps = 4096);

struct CombinationReport {
  double lhs = 0.0;
  double rhs = 0.0;
  // Signed so that margin >= -tolerance means the inequality holds.
  double margin = 0.0;
  double tolerance = 1e-9;
  bool holds = false;
};

// sum ln(1 + q lambda_z) >= cos^2 sum ln(1 + q lambda_u) + sin^2 sum ln(1 + q lambda_v)
CombinationReport cmmse_combination_check(std::span<const double> lambda_u, std::span<const double> lambda_v,
                                          double alpha, double q);
// D(lambda_z) <= cos^2 D(lambda_u) + sin^2 D(lambda_v)
CombinationReport divergence_combination_check(std::span<const double> lambda_u, std::span<const double> lambda_v,
                                               double alpha, double q);

struct LimitRow {
  double q = 0.0;
  double value = 0.0;
  double limit = 0.0;
  double gap = 0.0;
  bool converged = true;
};

struct LimitTable {
  std::vector<LimitRow> rows;
  double limit = 0.0;
  bool gap_decreasing = true;
  // Ratio of gaps at the last two ladder entries (0 when both gaps vanish).
  double tail_ratio = 0.0;
  // scalar table only: entries non-decreasing in q
  bool monotone = true;
  bool truncated = false;
  std::vector<std::string> notes;
};

LimitTable high_snr_limit_check(std::span<const double> lambda_u, std::span<const double> lambda_v, double alpha,
                                std::span<const double> q_ladder);

// D(sqrt(q) V + W || sqrt(q) V~ + W) for V ~ p, V~ its matched Gaussian and
// W standard normal, along an ascending ladder of q.
LimitTable scalar_channel_divergence_limit(const ScalarDistribution& p, std::span<const double> q_ladder);

struct EpiDemoReport {
  double lhs = 0.0;  // h(U cos a + V sin a)
  double rhs = 0.0;  // cos^2 h(U) + sin^2 h(V)
  double margin = 0.0;
  double half_width = 0.0;
  double tolerance = 1e-4;
  bool holds = false;
};

EpiDemoReport epi_from_cmmse_demo(const ScalarDistribution& p_u, const ScalarDistribution& p_v, double alpha,
                                  const GridOptions& options = {});

struct PathSimulationOptions {
  std::size_t paths = 10000;
  std::size_t steps = 4096;
  double horizon = 1.0;
  std::uint64_t seed = 0xc0ffee;
  unsigned jobs = 1;
  std::size_t checkpoints = 8;
  double sigmas = 3.0;
};

struct PathSimulation {
  std::vector<double> times;
  std::vector<double> empirical;
  std::vector<double> theoretical;
  std::vector<double> standard_error;
  bool within = true;
};

// Euler-Maruyama paths of the channel with U ~ N(0, lambda); the causal
// least-squares estimate is compared with lambda / (1 + q lambda t) at
// evenly spaced checkpoints. Results do not depend on `jobs`.
PathSimulation simulate_cmmse_paths(double lambda, double q, const PathSimulationOptions& options = {});

}  // namespace dpilab
