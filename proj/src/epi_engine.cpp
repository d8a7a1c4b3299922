#include "dpilab/epi_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dpilab/errors.hpp"
#include "dpilab/gaussian_info.hpp"

namespace dpilab {

namespace {

void require_pair(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw DomainError("EPI operands must have equal dimensions");
}

double prefactor_from_eigen(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed", 0.0);
  const auto& ev = solver.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw DomainError("covariance is not positive definite");
  return std::exp(ev.array().log().sum() / static_cast<double>(cov.rows()));
}

}  // namespace

EpiMargin epi_margin_gaussian(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& cov_y) {
  require_pair(cov_x, cov_y);
  const double n = static_cast<double>(cov_x.rows());
  EpiMargin m;
  m.x = std::exp(2.0 * gaussian_entropy(cov_x) / n);
  m.y = std::exp(2.0 * gaussian_entropy(cov_y) / n);
  m.sum = std::exp(2.0 * gaussian_entropy(Eigen::MatrixXd(cov_x + cov_y)) / n);
  m.margin = m.sum - m.x - m.y;
  return m;
}

EpiMargin epi_margin_scalar(const ScalarDistribution& p_x, const ScalarDistribution& p_y, const GridOptions& options) {
  const auto hx = differential_entropy_estimate(p_x);
  const auto hy = differential_entropy_estimate(p_y);
  const auto hs = differential_entropy_estimate(convolve(p_x, p_y, options));
  EpiMargin m;
  m.x = std::exp(2.0 * hx.value);
  m.y = std::exp(2.0 * hy.value);
  m.sum = std::exp(2.0 * hs.value);
  m.margin = m.sum - m.x - m.y;
  m.half_width = 2.0 * (m.x * hx.half_width + m.y * hy.half_width + m.sum * hs.half_width);
  return m;
}

DivergenceFormReport divergence_form_equivalence(const Eigen::MatrixXd& cov_x, const Eigen::MatrixXd& cov_y,
                                                 double d_x, double d_y, double d_sum) {
  require_pair(cov_x, cov_y);
  if (d_x < 0.0 || d_y < 0.0 || d_sum < 0.0) throw DomainError("divergences must be non-negative");
  const Eigen::MatrixXd cov_s = cov_x + cov_y;
  const double n = static_cast<double>(cov_x.rows());

  DivergenceFormReport r;
  r.prefactor_cholesky << std::exp(log_det_spd(cov_x) / n), std::exp(log_det_spd(cov_y) / n),
      std::exp(log_det_spd(cov_s) / n);
  r.prefactor_eigen << prefactor_from_eigen(cov_x), prefactor_from_eigen(cov_y), prefactor_from_eigen(cov_s);
  for (int i = 0; i < 3; ++i)
    r.prefactor_residual = std::max(
        r.prefactor_residual, std::abs(r.prefactor_cholesky[i] - r.prefactor_eigen[i]) / r.prefactor_cholesky[i]);

  r.lhs = std::exp(-2.0 * d_sum / n) * r.prefactor_cholesky[2];
  r.rhs_x = std::exp(-2.0 * d_x / n) * r.prefactor_cholesky[0];
  r.rhs_y = std::exp(-2.0 * d_y / n) * r.prefactor_cholesky[1];
  r.margin = r.lhs - r.rhs_x - r.rhs_y;

  const double ex = std::exp(2.0 * entropy_from_divergence(d_x, cov_x) / n);
  const double ey = std::exp(2.0 * entropy_from_divergence(d_y, cov_y) / n);
  const double es = std::exp(2.0 * entropy_from_divergence(d_sum, cov_s) / n);
  r.entropy_margin = es - ex - ey;
  const double scale = std::max({ex, ey, es});
  r.correspondence_residual = std::abs(r.entropy_margin - 2.0 * std::numbers::pi * std::numbers::e * r.margin) / scale;
  r.consistent = r.prefactor_residual <= 1e-8 && r.correspondence_residual <= 1e-8;
  return r;
}

}  // namespace dpilab
