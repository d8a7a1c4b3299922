#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace dpilab {

// Spectra touching this level are rejected: the log-spectral integral would
// diverge.
inline constexpr double kPositivityFloor = 1e-12;
inline constexpr std::size_t kDefaultTableSize = 4096;

struct White {
  double level = 1.0;
};

// sigma^2 |1 + sum b_k e^{-i2pi fk}|^2 / |1 - sum a_k e^{-i2pi fk}|^2
struct Arma {
  std::vector<double> ar;
  std::vector<double> ma;
  double innovation_variance = 1.0;
};

// Even step function on [-1/2, 1/2]. `breakpoints` lie strictly inside
// (0, 1/2) in increasing order and split |f| into levels.size() intervals
// [b_{i-1}, b_i); the last interval is closed at 1/2.
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> levels;
};

// Values on the uniform grid f_j = -1/2 + j/(n-1), j = 0..n-1, linearly
// interpolated. The table must be mirror-symmetric.
struct Tabulated {
  std::vector<double> values;
};

// Power spectral density of a discrete-time stationary process on
// f in [-1/2, 1/2] (cycles/sample). Immutable after construction; every
// constructor enforces evenness, positivity (>= kPositivityFloor) and, for
// ARMA, a stable AR part and a minimum-phase MA part.
class SpectralDensity {
 public:
  using Representation = std::variant<White, Arma, PiecewiseConstant, Tabulated>;

  static SpectralDensity white(double level);
  static SpectralDensity arma(std::vector<double> ar, std::vector<double> ma, double innovation_variance);
  static SpectralDensity piecewise(std::vector<double> breakpoints, std::vector<double> levels);
  static SpectralDensity tabulated(std::vector<double> values);
  // Samples `fn` on the default uniform grid and returns a Tabulated spectrum.
  static SpectralDensity tabulate(const std::function<double(double)>& fn,
                                  std::size_t points = kDefaultTableSize);

  const Representation& representation() const noexcept { return rep_; }

  double operator()(double f) const;

  // Total power, the integral of the spectrum over [-1/2, 1/2].
  double power() const;

  // c * spectrum, same representation.
  SpectralDensity scaled(double c) const;

  // Frequencies in [0, 1/2] (including both ends) where the spectrum may be
  // non-smooth; quadrature panels never straddle them.
  std::vector<double> kinks() const;

  bool is_white() const noexcept { return std::holds_alternative<White>(rep_); }

 private:
  explicit SpectralDensity(Representation rep) : rep_(std::move(rep)) {}
  Representation rep_;
};

double evaluate(const SpectralDensity& spectrum, double f);

// Integral of ln(spectrum) over [-1/2, 1/2].
double log_spectral_integral(const SpectralDensity& spectrum);

// Integral over [-1/2, 1/2] of ln(numerator(f) / sum_i terms_i(f)).
double log_ratio_integral(const SpectralDensity& numerator, std::span<const SpectralDensity> terms);

// r_k = integral of spectrum(f) cos(2 pi f k), k = 0..n-1.
std::vector<double> autocovariance(const SpectralDensity& spectrum, std::size_t n);

// Pointwise sum. White+White and step+step stay closed form; anything
// involving ARMA or a table is promoted to Tabulated.
SpectralDensity add(const SpectralDensity& a, const SpectralDensity& b);

// True when a = c * b for a constant c: max over a grid of |a/b - median ratio|
// is within `tolerance`.
bool proportional(const SpectralDensity& a, const SpectralDensity& b, double tolerance = 1e-9);

// True when all roots of 1 + c_1 z + ... + c_n z^n lie strictly outside the
// unit circle (Schur-Cohn step-down).
bool roots_outside_unit_circle(std::span<const double> coefficients);

// Band-limited continuous-time spectrum F(f) on [-B, B] (Hz), zero outside.
// F(f) = shape(f / 2B): the shape is a discrete-time spectrum whose
// frequency axis is stretched onto the band.
class ContinuousSpectralDensity {
 public:
  ContinuousSpectralDensity(double bandwidth, SpectralDensity shape);

  double bandwidth() const noexcept { return bandwidth_; }
  const SpectralDensity& shape() const noexcept { return shape_; }

  double operator()(double f) const;
  double power() const;
  // Integral of ln F over [-B, B].
  double log_spectral_integral() const;

 private:
  double bandwidth_;
  SpectralDensity shape_;
};

// Spectrum of the process sampled at f_s = 2B: Phi(f) = 2B * F(2B f).
SpectralDensity sample_bandlimited(const ContinuousSpectralDensity& spectrum);

// Integral over [-B, B] of ln(numerator(f) / sum_i terms_i(f)).
double log_ratio_integral(const ContinuousSpectralDensity& numerator,
                          std::span<const ContinuousSpectralDensity> terms);

}  // namespace dpilab
