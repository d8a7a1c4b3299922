#pragma once

#include <Eigen/Dense>

#include "dpilab/scalar_models.hpp"

namespace dpilab {

// Entropy powers e^{(2/N) h} of X + Y, X and Y, and margin = sum - x - y.
struct EpiMargin {
  double sum = 0.0;
  double x = 0.0;
  double y = 0.0;
  double margin = 0.0;
  // Error budget carried over from entropy estimates (0 when exact).
  double half_width = 0.0;
};

// Absolute budget for scalar margins near zero (convolution grid error).
inline constexpr double kScalarEpiTolerance = 1e-4;

EpiMargin epi_margin_gaussian(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& cov_y);
EpiMargin epi_margin_scalar(const ScalarDistribution& p_x, const ScalarDistribution& p_y,
                            const GridOptions& options = {});

struct DivergenceFormReport {
  // |cov|^{1/N} for X, Y, X + Y: from Cholesky and from eigenvalue sums.
  Eigen::Vector3d prefactor_cholesky;
  Eigen::Vector3d prefactor_eigen;
  double prefactor_residual = 0.0;  // max relative difference

  // e^{-2 D_sum / N} |S|^{1/N} >= e^{-2 D_x / N} |X|^{1/N} + e^{-2 D_y / N} |Y|^{1/N}
  double lhs = 0.0;
  double rhs_x = 0.0;
  double rhs_y = 0.0;
  double margin = 0.0;
  // Entropy-power margin with h = h(g) - D, and its distance from
  // 2 pi e * margin, relative to the largest entropy power.
  double entropy_margin = 0.0;
  double correspondence_residual = 0.0;
  bool consistent = false;
};

// D's are divergences from the Gaussians with the given covariances.
DivergenceFormReport divergence_form_equivalence(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& cov_y,
                                                 double d_x, double d_y, double d_sum);

}  // namespace dpilab
