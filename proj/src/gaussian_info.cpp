#include "dpilab/gaussian_info.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dpilab/errors.hpp"

namespace dpilab {

namespace {

const double kLogTwoPiE = std::log(2.0 * std::numbers::pi * std::numbers::e);

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DomainError("covariance must be a non-empty square matrix");
  if (!m.allFinite()) throw DomainError("covariance has non-finite entries");
  if (!m.isApprox(m.transpose(), 1e-12)) throw DomainError("covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  const double rcond = llt.rcond();
  if (rcond < 1.0 / kMaxConditionNumber)
    throw NumericalError("covariance condition number exceeds 1e12", 1.0 / rcond);
  return llt;
}

}  // namespace

GaussianVector::GaussianVector(Eigen::MatrixXd covariance)
    : covariance_(std::move(covariance)), log_det_(log_det_spd(covariance_)) {}

double GaussianVector::entropy() const {
  return 0.5 * static_cast<double>(dimension()) * kLogTwoPiE + 0.5 * log_det_;
}

double log_det_spd(const Eigen::MatrixXd& covariance) {
  const auto llt = checked_cholesky(covariance);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double gaussian_entropy(const Eigen::MatrixXd& covariance) { return GaussianVector(covariance).entropy(); }

double gaussian_entropy(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw DomainError("variance must be positive");
  return 0.5 * kLogTwoPiE + 0.5 * std::log(variance);
}

double gaussian_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw DomainError("gaussian_divergence: dimension mismatch");
  const auto llt_p = checked_cholesky(p);
  const auto llt_q = checked_cholesky(q);
  const double trace = llt_q.solve(p).trace();
  const double ld_p = 2.0 * llt_p.matrixLLT().diagonal().array().log().sum();
  const double ld_q = 2.0 * llt_q.matrixLLT().diagonal().array().log().sum();
  const double d = 0.5 * (trace - static_cast<double>(p.rows()) - (ld_p - ld_q));
  return d < 0.0 ? 0.0 : d;
}

double entropy_from_divergence(double divergence, const Eigen::MatrixXd& covariance) {
  if (!(divergence >= 0.0)) throw DomainError("divergence must be non-negative, got " + std::to_string(divergence));
  return gaussian_entropy(covariance) - divergence;
}

double entropy_from_divergence(double divergence, double variance) {
  if (!(divergence >= 0.0)) throw DomainError("divergence must be non-negative, got " + std::to_string(divergence));
  return gaussian_entropy(variance) - divergence;
}

}  // namespace dpilab
