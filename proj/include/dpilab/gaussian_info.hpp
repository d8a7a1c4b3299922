#pragma once

#include <Eigen/Dense>

namespace dpilab {

// Cholesky guard: reciprocal condition estimates below this are rejected.
inline constexpr double kMaxConditionNumber = 1e12;

// Zero-mean Gaussian vector, represented by its covariance. Construction
// checks symmetry, finiteness and positive definiteness.
class GaussianVector {
 public:
  explicit GaussianVector(Eigen::MatrixXd covariance);

  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  Eigen::Index dimension() const noexcept { return covariance_.rows(); }
  double log_det() const noexcept { return log_det_; }
  double entropy() const;

 private:
  Eigen::MatrixXd covariance_;
  double log_det_;
};

// ln|cov| via Cholesky. Throws DomainError when not PD and NumericalError
// when the condition estimate exceeds kMaxConditionNumber.
double log_det_spd(const Eigen::MatrixXd& covariance);

// (N/2) ln(2 pi e) + (1/2) ln|cov|, in nats.
double gaussian_entropy(const Eigen::MatrixXd& covariance);
double gaussian_entropy(double variance);

// D(N(0, p) || N(0, q)) = (1/2)[tr(q^{-1} p) - N - ln(|p|/|q|)].
double gaussian_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

// h(p) = h(g) - D(p || g) for the Gaussian g with covariance `covariance`.
double entropy_from_divergence(double divergence, const Eigen::MatrixXd& covariance);
double entropy_from_divergence(double divergence, double variance);

}  // namespace dpilab
