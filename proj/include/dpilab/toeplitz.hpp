#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "dpilab/spectra.hpp"

namespace dpilab {

inline constexpr std::size_t kMaxToeplitzDimension = 2048;

// N x N symmetric Toeplitz covariance of a stationary process, built from
// the first N autocovariances of a valid spectrum. Positive definiteness is
// checked by Cholesky at construction.
class ToeplitzCovariance {
 public:
  static ToeplitzCovariance from_spectrum(const SpectralDensity& spectrum, std::size_t n);

  std::size_t dimension() const noexcept { return r_.size(); }
  const std::vector<double>& autocovariance() const noexcept { return r_; }
  Eigen::MatrixXd matrix() const;

  // Ascending, strictly positive.
  std::vector<double> eigenvalues() const;
  // ln det via Cholesky.
  double log_det() const;

 private:
  explicit ToeplitzCovariance(std::vector<double> r) : r_(std::move(r)) {}
  std::vector<double> r_;
};

Eigen::MatrixXd toeplitz_matrix(std::span<const double> first_column);

std::vector<double> toeplitz_eigenvalues(const SpectralDensity& spectrum, std::size_t n);
double log_det(const SpectralDensity& spectrum, std::size_t n);

struct SzegoRow {
  std::size_t n = 0;
  double mean_log_eigenvalue = 0.0;
  double limit = 0.0;
  double gap = 0.0;
};

// (1/N) sum ln(lambda_i) against the log-spectral integral for each size.
// Sizes are processed concurrently on up to `jobs` threads.
std::vector<SzegoRow> szego_convergence_table(const SpectralDensity& spectrum, std::span<const std::size_t> sizes,
                                              unsigned jobs = 1);

}  // namespace dpilab
