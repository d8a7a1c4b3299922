#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's quadrature, FFT and Eigen paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Simpson over consecutive breakpoints.
inline double simpson_pieces(const std::function<double(double)>& f, const std::vector<double>& pts, int n = 4000) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += simpson(f, pts[i], pts[i + 1], n);
  return s;
}

using Matrix = std::vector<std::vector<double>>;

// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// ln det by Gaussian elimination with partial pivoting (SPD input).
inline double log_det(Matrix a) {
  const std::size_t n = a.size();
  double ld = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    std::swap(a[k], a[piv]);
    ld += std::log(std::abs(a[k][k]));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
    }
  }
  return ld;
}

inline Matrix toeplitz(const std::vector<double>& r) {
  const std::size_t n = r.size();
  Matrix m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = r[i > j ? i - j : j - i];
  return m;
}

// Autocovariance of x_t = a x_{t-1} + e_t, var(e) = s2.
inline double ar1_autocovariance(double a, double s2, int k) { return s2 * std::pow(a, k) / (1.0 - a * a); }

// Direct O(n m) linear convolution scaled by the grid step.
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& y, double step) {
  std::vector<double> out(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j] * step;
  return out;
}

inline double gaussian_entropy(double var) { return 0.5 * std::log(2.0 * kPi * kE * var); }

// Entropies of named laws.
inline double uniform_entropy(double half_width) { return std::log(2.0 * half_width); }
inline double laplace_entropy(double b) { return 1.0 + std::log(2.0 * b); }
// Sum of two U[-a, a]: triangle on [-2a, 2a].
inline double triangle_entropy(double a) { return 0.5 + std::log(2.0 * a); }

// D(p || matched Gaussian) for a symmetric density given on [0, upper].
inline double divergence_symmetric(const std::function<double(double)>& pdf, double var, const std::vector<double>& pts,
                                   int n = 4000) {
  const double h = -2.0 * simpson_pieces(
                              [&](double x) {
                                const double p = pdf(x);
                                return p > 0.0 ? p * std::log(p) : 0.0;
                              },
                              pts, n);
  return gaussian_entropy(var) - h;
}

// Density of the sum of k i.i.d. Laplace(b), k = 2 or 3.
inline double laplace_sum_pdf(double x, double b, int k) {
  const double u = std::abs(x) / b;
  if (k == 2) return (1.0 + u) * std::exp(-u) / (4.0 * b);
  return (u * u + 3.0 * u + 3.0) * std::exp(-u) / (16.0 * b);
}

inline double normal_pdf(double x, double var) { return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * kPi * var); }

// Density of U[-a, a] + N(0, s2) by Simpson convolution.
inline double smoothed_uniform_pdf(double y, double a, double s2) {
  return simpson([&](double x) { return normal_pdf(y - x, s2); }, -a, a, 2000) / (2.0 * a);
}

}  // namespace oracle
