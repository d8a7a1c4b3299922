#include "dpilab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dpilab/errors.hpp"

namespace dpilab {

namespace {

constexpr int kOrder = 10;

struct GaussLegendreRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendreRule() {
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendreRule& rule() {
  static const GaussLegendreRule r;
  return r;
}

double composite(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  const auto& gl = rule();
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (int i = 0; i < kOrder; ++i) s += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options) {
  if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");
  const std::size_t segments = breakpoints.size() - 1;
  auto estimate = [&](std::size_t per_segment) {
    double total = 0.0;
    for (std::size_t s = 0; s < segments; ++s) {
      if (breakpoints[s + 1] > breakpoints[s])
        total += composite(f, breakpoints[s], breakpoints[s + 1], per_segment);
    }
    return total;
  };

  QuadratureResult result;
  result.error = std::numeric_limits<double>::infinity();
  std::size_t per_segment = 1;
  double previous = estimate(per_segment);
  while (true) {
    const std::size_t next = per_segment * 2;
    if (next * segments > std::max(options.max_panels, 2 * segments)) {
      result.value = previous;
      result.panels = per_segment * segments;
      result.converged = false;
      return result;
    }
    const double current = estimate(next);
    const double diff = std::abs(current - previous);
    per_segment = next;
    result.value = current;
    result.error = diff;
    result.panels = per_segment * segments;
    if (diff < std::max(options.tolerance, options.relative_tolerance * std::abs(current))) {
      result.converged = true;
      return result;
    }
    previous = current;
  }
}

double integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const QuadratureOptions& options) {
  const auto r = integrate_adaptive(f, breakpoints, options);
  if (!r.converged) throw NumericalError("quadrature did not converge within the panel cap", r.error);
  return r.value;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
  const std::array<double, 2> bp{a, b};
  return integrate(f, bp, options);
}

}  // namespace dpilab
