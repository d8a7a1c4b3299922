#include "dpilab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "dpilab/errors.hpp"
#include "dpilab/quadrature.hpp"
#include "fft.hpp"

namespace dpilab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v < kPositivityFloor)
    throw DomainError(std::string(what) + ": spectral level must be finite and >= 1e-12, got " +
                      std::to_string(v));
}

double arma_value(const Arma& m, double f) {
  const double w = kTwoPi * f;
  std::complex<double> a{1.0, 0.0};
  for (std::size_t k = 0; k < m.ar.size(); ++k) a -= m.ar[k] * std::polar(1.0, -w * static_cast<double>(k + 1));
  std::complex<double> b{1.0, 0.0};
  for (std::size_t k = 0; k < m.ma.size(); ++k) b += m.ma[k] * std::polar(1.0, -w * static_cast<double>(k + 1));
  return m.innovation_variance * std::norm(b) / std::norm(a);
}

double table_value(const Tabulated& t, double f) {
  const std::size_t n = t.values.size();
  const double pos = (f + 0.5) * static_cast<double>(n - 1);
  auto j = static_cast<std::size_t>(std::floor(pos));
  if (j >= n - 1) j = n - 2;
  const double frac = pos - static_cast<double>(j);
  return (1.0 - frac) * t.values[j] + frac * t.values[j + 1];
}

double piecewise_value(const PiecewiseConstant& p, double f) {
  const auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), f);
  return p.levels[static_cast<std::size_t>(it - p.breakpoints.begin())];
}

// Integral over [0, 1] of ln(y0 + (y1 - y0) t).
double mean_log_linear(double y0, double y1) {
  const double mid = 0.5 * (y0 + y1);
  const double u = (y1 - y0) / mid;
  if (std::abs(u) < 1e-2) {
    const double u2 = u * u;
    return std::log(mid) - u2 / 24.0 - u2 * u2 / 160.0 - u2 * u2 * u2 / 896.0;
  }
  return (y1 * std::log(y1) - y0 * std::log(y0)) / (y1 - y0) - 1.0;
}

std::vector<double> arma_autocovariance(const SpectralDensity& s, std::size_t n) {
  // Periodic trapezoid rule is exact up to aliasing r_k + r_{k+M} + ...;
  // double M until the aliased tail is invisible.
  std::size_t m = std::max<std::size_t>(detail::next_pow2(4 * n), 256);
  std::vector<double> previous;
  constexpr std::size_t kMaxPoints = std::size_t{1} << 24;
  double change = 0.0;
  while (m <= kMaxPoints) {
    std::vector<double> samples(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double f = static_cast<double>(j) / static_cast<double>(m);
      samples[j] = s(f <= 0.5 ? f : f - 1.0);
    }
    const auto spectrum = detail::rfft(samples);
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = spectrum[k].real() / static_cast<double>(m);
    if (!previous.empty()) {
      change = 0.0;
      for (std::size_t k = 0; k < n; ++k) change = std::max(change, std::abs(r[k] - previous[k]));
      if (change <= 1e-14 * std::abs(r[0])) return r;
    }
    previous = std::move(r);
    m *= 2;
  }
  throw NumericalError("autocovariance: aliasing did not settle", change);
}

std::vector<double> table_autocovariance(const Tabulated& t, std::size_t n) {
  const std::size_t cells = t.values.size() - 1;
  const double h = 1.0 / static_cast<double>(cells);
  std::vector<double> r(n, 0.0);
  for (std::size_t j = 0; j < cells; ++j) r[0] += 0.5 * h * (t.values[j] + t.values[j + 1]);
  for (std::size_t k = 1; k < n; ++k) {
    const double w = kTwoPi * static_cast<double>(k);
    const double half = std::sin(0.5 * w * h);
    double acc = 0.0;
    // Value terms telescope to zero for integer lags; only the slope terms remain.
    for (std::size_t j = 0; j < cells; ++j) {
      const double slope = (t.values[j + 1] - t.values[j]) / h;
      const double mid = -0.5 + (static_cast<double>(j) + 0.5) * h;
      acc += slope * (-2.0 * std::sin(w * mid) * half);
    }
    r[k] = acc / (w * w);
  }
  return r;
}

std::vector<double> table_grid_kinks(std::size_t points) {
  std::vector<double> k{0.0};
  const double h = 1.0 / static_cast<double>(points - 1);
  for (std::size_t j = 0; j < points; ++j) {
    const double f = -0.5 + static_cast<double>(j) * h;
    if (f > 0.0 && f < 0.5) k.push_back(f);
  }
  k.push_back(0.5);
  return k;
}

std::vector<double> merged_kinks(std::span<const SpectralDensity> spectra) {
  std::vector<double> all;
  for (const auto& s : spectra) {
    const auto k = s.kinks();
    all.insert(all.end(), k.begin(), k.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
            all.end());
  return all;
}

}  // namespace

bool roots_outside_unit_circle(std::span<const double> coefficients) {
  std::vector<double> a(coefficients.begin(), coefficients.end());
  while (!a.empty() && a.back() == 0.0) a.pop_back();
  for (std::size_t m = a.size(); m > 0; --m) {
    const double k = a[m - 1];
    if (!(std::abs(k) < 1.0)) return false;
    std::vector<double> next(m - 1);
    const double denom = 1.0 - k * k;
    for (std::size_t i = 0; i + 1 < m; ++i) next[i] = (a[i] - k * a[m - 2 - i]) / denom;
    a = std::move(next);
  }
  return true;
}

SpectralDensity SpectralDensity::white(double level) {
  require_positive(level, "white");
  return SpectralDensity(White{level});
}

SpectralDensity SpectralDensity::arma(std::vector<double> ar, std::vector<double> ma, double innovation_variance) {
  require_positive(innovation_variance, "arma innovation variance");
  std::vector<double> a_poly(ar.size());
  for (std::size_t k = 0; k < ar.size(); ++k) a_poly[k] = -ar[k];
  if (!roots_outside_unit_circle(a_poly))
    throw DomainError("arma: AR polynomial must have all roots strictly outside the unit circle");
  if (!roots_outside_unit_circle(ma))
    throw DomainError("arma: MA polynomial must have all roots strictly outside the unit circle");
  SpectralDensity s(Arma{std::move(ar), std::move(ma), innovation_variance});
  const auto& m = std::get<Arma>(s.rep_);
  for (std::size_t j = 0; j <= 4096; ++j) {
    const double v = arma_value(m, 0.5 * static_cast<double>(j) / 4096.0);
    if (!(v >= kPositivityFloor)) throw DomainError("arma: spectrum falls below the positivity floor");
  }
  return s;
}

SpectralDensity SpectralDensity::piecewise(std::vector<double> breakpoints, std::vector<double> levels) {
  if (levels.size() != breakpoints.size() + 1)
    throw DomainError("piecewise: need exactly one more level than breakpoints");
  double prev = 0.0;
  for (double b : breakpoints) {
    if (!(b > prev) || !(b < 0.5))
      throw DomainError("piecewise: breakpoints must increase strictly inside (0, 1/2)");
    prev = b;
  }
  for (double l : levels) require_positive(l, "piecewise");
  return SpectralDensity(PiecewiseConstant{std::move(breakpoints), std::move(levels)});
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw DomainError("tabulated: need at least two grid values");
  for (double v : values) require_positive(v, "tabulated");
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double a = values[j];
    const double b = values[n - 1 - j];
    if (std::abs(a - b) > 1e-12 * std::max(a, b))
      throw DomainError("tabulated: grid values must be mirror-symmetric (even spectrum)");
    values[n - 1 - j] = a;
  }
  return SpectralDensity(Tabulated{std::move(values)});
}

SpectralDensity SpectralDensity::tabulate(const std::function<double(double)>& fn, std::size_t points) {
  if (points < 2) throw DomainError("tabulate: need at least two points");
  std::vector<double> values(points);
  const double h = 1.0 / static_cast<double>(points - 1);
  for (std::size_t j = 0; j < points; ++j) values[j] = fn(std::abs(-0.5 + static_cast<double>(j) * h));
  for (std::size_t j = 0; j < points / 2; ++j) values[points - 1 - j] = values[j];
  return tabulated(std::move(values));
}

double SpectralDensity::operator()(double f) const {
  if (!(f >= -0.5 && f <= 0.5)) throw DomainError("spectrum evaluated outside [-1/2, 1/2]: " + std::to_string(f));
  const double af = std::abs(f);
  return std::visit(overloaded{
                        [](const White& w) { return w.level; },
                        [af](const Arma& m) { return arma_value(m, af); },
                        [af](const PiecewiseConstant& p) { return piecewise_value(p, af); },
                        [af](const Tabulated& t) { return table_value(t, af); },
                    },
                    rep_);
}

double SpectralDensity::power() const {
  return std::visit(overloaded{
                        [](const White& w) { return w.level; },
                        [this](const Arma&) { return autocovariance(*this, 1)[0]; },
                        [](const PiecewiseConstant& p) {
                          double total = 0.0;
                          double lo = 0.0;
                          for (std::size_t i = 0; i < p.levels.size(); ++i) {
                            const double hi = i < p.breakpoints.size() ? p.breakpoints[i] : 0.5;
                            total += 2.0 * (hi - lo) * p.levels[i];
                            lo = hi;
                          }
                          return total;
                        },
                        [this](const Tabulated& t) { return table_autocovariance(t, 1)[0]; },
                    },
                    rep_);
}

SpectralDensity SpectralDensity::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("spectrum scale factor must be positive");
  return std::visit(overloaded{
                        [c](const White& w) { return white(w.level * c); },
                        [c](const Arma& m) { return arma(m.ar, m.ma, m.innovation_variance * c); },
                        [c](const PiecewiseConstant& p) {
                          auto levels = p.levels;
                          for (auto& l : levels) l *= c;
                          return piecewise(p.breakpoints, std::move(levels));
                        },
                        [c](const Tabulated& t) {
                          auto values = t.values;
                          for (auto& v : values) v *= c;
                          return tabulated(std::move(values));
                        },
                    },
                    rep_);
}

std::vector<double> SpectralDensity::kinks() const {
  return std::visit(overloaded{
                        [](const White&) { return std::vector<double>{0.0, 0.5}; },
                        [](const Arma&) { return std::vector<double>{0.0, 0.5}; },
                        [](const PiecewiseConstant& p) {
                          std::vector<double> k{0.0};
                          k.insert(k.end(), p.breakpoints.begin(), p.breakpoints.end());
                          k.push_back(0.5);
                          return k;
                        },
                        [](const Tabulated& t) { return table_grid_kinks(t.values.size()); },
                    },
                    rep_);
}

double evaluate(const SpectralDensity& spectrum, double f) { return spectrum(f); }

double log_spectral_integral(const SpectralDensity& spectrum) {
  return std::visit(overloaded{
                        [](const White& w) { return std::log(w.level); },
                        [&spectrum](const Arma&) {
                          const auto kinks = spectrum.kinks();
                          return 2.0 * integrate([&](double f) { return std::log(spectrum(f)); }, kinks);
                        },
                        [](const PiecewiseConstant& p) {
                          double total = 0.0;
                          double lo = 0.0;
                          for (std::size_t i = 0; i < p.levels.size(); ++i) {
                            const double hi = i < p.breakpoints.size() ? p.breakpoints[i] : 0.5;
                            total += 2.0 * (hi - lo) * std::log(p.levels[i]);
                            lo = hi;
                          }
                          return total;
                        },
                        [](const Tabulated& t) {
                          const std::size_t cells = t.values.size() - 1;
                          double total = 0.0;
                          for (std::size_t j = 0; j < cells; ++j) total += mean_log_linear(t.values[j], t.values[j + 1]);
                          return total / static_cast<double>(cells);
                        },
                    },
                    spectrum.representation());
}

double log_ratio_integral(const SpectralDensity& numerator, std::span<const SpectralDensity> terms) {
  if (terms.empty()) throw DomainError("log_ratio_integral: empty denominator");
  std::vector<SpectralDensity> all(terms.begin(), terms.end());
  all.push_back(numerator);
  const auto kinks = merged_kinks(all);
  auto integrand = [&](double f) {
    double total = 0.0;
    for (const auto& t : terms) total += t(f);
    return std::log(numerator(f)) - std::log(total);
  };
  return 2.0 * integrate(integrand, kinks);
}

std::vector<double> autocovariance(const SpectralDensity& spectrum, std::size_t n) {
  if (n == 0) throw DomainError("autocovariance: N must be >= 1");
  return std::visit(overloaded{
                        [n](const White& w) {
                          std::vector<double> r(n, 0.0);
                          r[0] = w.level;
                          return r;
                        },
                        [&spectrum, n](const Arma&) { return arma_autocovariance(spectrum, n); },
                        [n](const PiecewiseConstant& p) {
                          std::vector<double> r(n, 0.0);
                          double lo = 0.0;
                          for (std::size_t i = 0; i < p.levels.size(); ++i) {
                            const double hi = i < p.breakpoints.size() ? p.breakpoints[i] : 0.5;
                            r[0] += 2.0 * (hi - lo) * p.levels[i];
                            for (std::size_t k = 1; k < n; ++k) {
                              const double w = kTwoPi * static_cast<double>(k);
                              r[k] += 2.0 * p.levels[i] * (std::sin(w * hi) - std::sin(w * lo)) / w;
                            }
                            lo = hi;
                          }
                          return r;
                        },
                        [n](const Tabulated& t) { return table_autocovariance(t, n); },
                    },
                    spectrum.representation());
}

SpectralDensity add(const SpectralDensity& a, const SpectralDensity& b) {
  const auto* wa = std::get_if<White>(&a.representation());
  const auto* wb = std::get_if<White>(&b.representation());
  if (wa && wb) return SpectralDensity::white(wa->level + wb->level);

  const bool a_step = wa || std::holds_alternative<PiecewiseConstant>(a.representation());
  const bool b_step = wb || std::holds_alternative<PiecewiseConstant>(b.representation());
  if (a_step && b_step) {
    std::vector<SpectralDensity> pair{a, b};
    auto kinks = merged_kinks(pair);
    std::vector<double> breakpoints(kinks.begin() + 1, kinks.end() - 1);
    std::vector<double> levels;
    for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
      const double mid = 0.5 * (kinks[i] + kinks[i + 1]);
      levels.push_back(a(mid) + b(mid));
    }
    return SpectralDensity::piecewise(std::move(breakpoints), std::move(levels));
  }

  std::size_t points = kDefaultTableSize;
  for (const auto* s : {&a, &b}) {
    if (const auto* t = std::get_if<Tabulated>(&s->representation())) points = std::max(points, t->values.size());
  }
  return SpectralDensity::tabulate([&](double f) { return a(f) + b(f); }, points);
}

bool proportional(const SpectralDensity& a, const SpectralDensity& b, double tolerance) {
  constexpr std::size_t kGrid = 1024;
  std::vector<double> ratios;
  ratios.reserve(kGrid + 1);
  for (std::size_t j = 0; j <= kGrid; ++j) {
    const double f = 0.5 * static_cast<double>(j) / static_cast<double>(kGrid);
    ratios.push_back(a(f) / b(f));
  }
  std::vector<double> sorted = ratios;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, std::abs(r - median));
  return worst <= tolerance;
}

ContinuousSpectralDensity::ContinuousSpectralDensity(double bandwidth, SpectralDensity shape)
    : bandwidth_(bandwidth), shape_(std::move(shape)) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("bandwidth B must be positive");
}

double ContinuousSpectralDensity::operator()(double f) const {
  if (std::abs(f) > bandwidth_) return 0.0;
  return shape_(std::clamp(f / (2.0 * bandwidth_), -0.5, 0.5));
}

namespace {
std::vector<double> band_kinks(const ContinuousSpectralDensity& s) {
  auto k = s.shape().kinks();
  for (auto& f : k) f *= 2.0 * s.bandwidth();
  k.back() = s.bandwidth();
  return k;
}
}  // namespace

double ContinuousSpectralDensity::power() const {
  const auto kinks = band_kinks(*this);
  return 2.0 * integrate([this](double f) { return (*this)(f); }, kinks);
}

double ContinuousSpectralDensity::log_spectral_integral() const {
  const auto kinks = band_kinks(*this);
  return 2.0 * integrate([this](double f) { return std::log((*this)(f)); }, kinks);
}

SpectralDensity sample_bandlimited(const ContinuousSpectralDensity& spectrum) {
  return spectrum.shape().scaled(2.0 * spectrum.bandwidth());
}

double log_ratio_integral(const ContinuousSpectralDensity& numerator,
                          std::span<const ContinuousSpectralDensity> terms) {
  if (terms.empty()) throw DomainError("log_ratio_integral: empty denominator");
  std::vector<double> kinks = band_kinks(numerator);
  for (const auto& t : terms) {
    if (t.bandwidth() != numerator.bandwidth()) throw DomainError("log_ratio_integral: bandwidth mismatch");
    const auto k = band_kinks(t);
    kinks.insert(kinks.end(), k.begin(), k.end());
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              kinks.end());
  auto integrand = [&](double f) {
    double total = 0.0;
    for (const auto& t : terms) total += t(f);
    return std::log(numerator(f)) - std::log(total);
  };
  return 2.0 * integrate(integrand, kinks);
}

}  // namespace dpilab
