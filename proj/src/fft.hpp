#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dpilab::detail {

// Forward real DFT, X_k = sum_j x_j exp(-2 pi i jk/n), k = 0..n/2.
std::vector<std::complex<double>> rfft(std::span<const double> input);

// Inverse of rfft including the 1/n factor.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace dpilab::detail
