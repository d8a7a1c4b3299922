#include "dpilab/toeplitz.hpp"

#include <cmath>
#include <string>

#include "dpilab/errors.hpp"
#include "dpilab/parallel.hpp"

namespace dpilab {

Eigen::MatrixXd toeplitz_matrix(std::span<const double> first_column) {
  const auto n = static_cast<Eigen::Index>(first_column.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = first_column[static_cast<std::size_t>(std::abs(i - j))];
  return m;
}

ToeplitzCovariance ToeplitzCovariance::from_spectrum(const SpectralDensity& spectrum, std::size_t n) {
  if (n == 0) throw DomainError("Toeplitz dimension must be >= 1");
  if (n > kMaxToeplitzDimension) throw DomainError("Toeplitz dimension above 2048 is not supported");
  ToeplitzCovariance t(dpilab::autocovariance(spectrum, n));
  Eigen::LLT<Eigen::MatrixXd> llt(t.matrix());
  if (llt.info() != Eigen::Success) throw InvariantError("Toeplitz covariance is not positive definite");
  return t;
}

Eigen::MatrixXd ToeplitzCovariance::matrix() const { return toeplitz_matrix(r_); }

std::vector<double> ToeplitzCovariance::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed", 0.0);
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  if (out.front() <= 0.0)
    throw InvariantError("Toeplitz covariance has a non-positive eigenvalue " + std::to_string(out.front()));
  return out;
}

double ToeplitzCovariance::log_det() const {
  Eigen::LLT<Eigen::MatrixXd> llt(matrix());
  if (llt.info() != Eigen::Success) throw InvariantError("Cholesky breakdown: matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

std::vector<double> toeplitz_eigenvalues(const SpectralDensity& spectrum, std::size_t n) {
  return ToeplitzCovariance::from_spectrum(spectrum, n).eigenvalues();
}

double log_det(const SpectralDensity& spectrum, std::size_t n) {
  return ToeplitzCovariance::from_spectrum(spectrum, n).log_det();
}

std::vector<SzegoRow> szego_convergence_table(const SpectralDensity& spectrum, std::span<const std::size_t> sizes,
                                              unsigned jobs) {
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw DomainError("szego: sizes must be strictly ascending");
  const double limit = log_spectral_integral(spectrum);
  std::vector<SzegoRow> rows(sizes.size());
  parallel_for(sizes.size(), jobs, [&](std::size_t i) {
    const auto ev = toeplitz_eigenvalues(spectrum, sizes[i]);
    double sum = 0.0;
    for (double l : ev) sum += std::log(l);
    const double mean = sum / static_cast<double>(ev.size());
    rows[i] = SzegoRow{sizes[i], mean, limit, std::abs(mean - limit)};
  });
  return rows;
}

}  // namespace dpilab
