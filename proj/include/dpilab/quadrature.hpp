#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace dpilab {

struct QuadratureOptions {
  double tolerance = 1e-10;          // successive-estimate difference
  double relative_tolerance = 1e-13; // guards very large integrals
  std::size_t max_panels = 1u << 16;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |last - previous| estimate
  std::size_t panels = 0;
  bool converged = false;
};

// Composite 10-point Gauss-Legendre over the segments delimited by
// `breakpoints` (sorted, at least two entries). Every segment starts with
// one panel; panel counts are doubled until two successive totals agree.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options = {});

// Same as integrate_adaptive but throws NumericalError when the panel cap is
// reached without convergence.
double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const QuadratureOptions& options = {});

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options = {});

}  // namespace dpilab
