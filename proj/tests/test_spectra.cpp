#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dpilab/errors.hpp"
#include "dpilab/spectra.hpp"
#include "oracles.hpp"

using namespace dpilab;
using doctest::Approx;

TEST_SUITE("spectra") {
  TEST_CASE("evaluate closed forms") {
    CHECK(SpectralDensity::white(2.0)(0.3) == 2.0);
    CHECK(SpectralDensity::arma({0.5}, {}, 0.75)(0.0) == Approx(3.0).epsilon(1e-14));
    // even equivalent of a level-1 / level-3 split at a quarter band
    CHECK(SpectralDensity::piecewise({0.25}, {1.0, 3.0})(0.25) == 3.0);
    CHECK(SpectralDensity::piecewise({0.25}, {1.0, 3.0})(-0.1) == 1.0);
    CHECK_THROWS_AS(SpectralDensity::white(1.0)(0.6), DomainError);
  }

  TEST_CASE("construction invariants") {
    CHECK_THROWS_AS(SpectralDensity::white(0.0), DomainError);
    CHECK_THROWS_AS(SpectralDensity::arma({1.1}, {}, 1.0), DomainError);
    CHECK_THROWS_AS(SpectralDensity::arma({0.5}, {2.0}, 1.0), DomainError);
    CHECK_THROWS_AS(SpectralDensity::piecewise({0.3, 0.2}, {1.0, 2.0, 3.0}), DomainError);
    CHECK_THROWS_AS(SpectralDensity::tabulated({1.0, 2.0, 3.0, 1.5}), DomainError);
    CHECK(roots_outside_unit_circle(std::vector<double>{-0.9}));
    CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{-1.2}));
  }

  TEST_CASE("log spectral integral against Simpson") {
    CHECK(log_spectral_integral(SpectralDensity::white(4.0)) == Approx(std::log(4.0)).epsilon(1e-15));
    CHECK(std::abs(log_spectral_integral(SpectralDensity::arma({0.9}, {}, 1.0))) < 1e-10);
    CHECK(log_spectral_integral(SpectralDensity::piecewise({0.25}, {1.0, 4.0})) ==
          Approx(std::log(2.0)).epsilon(1e-14));

    const auto arma = SpectralDensity::arma({0.5, -0.3}, {0.4}, 2.0);
    const double ref = oracle::simpson([&](double f) { return std::log(arma(f)); }, -0.5, 0.5, 20000);
    CHECK(log_spectral_integral(arma) == Approx(ref).epsilon(1e-10));

    const auto tab = SpectralDensity::tabulate([](double f) { return 2.0 + std::cos(2.0 * oracle::kPi * f); }, 257);
    const double tref = oracle::simpson([&](double f) { return std::log(tab(f)); }, -0.5, 0.5, 200000);
    CHECK(log_spectral_integral(tab) == Approx(tref).epsilon(1e-9));
  }

  TEST_CASE("autocovariance against closed forms and Simpson") {
    const auto w = autocovariance(SpectralDensity::white(1.7), 5);
    CHECK(w[0] == 1.7);
    for (std::size_t k = 1; k < 5; ++k) CHECK(w[k] == 0.0);

    const auto r = autocovariance(SpectralDensity::arma({0.5}, {}, 0.75), 8);
    for (int k = 0; k < 8; ++k) CHECK(r[k] == Approx(oracle::ar1_autocovariance(0.5, 0.75, k)).epsilon(1e-12));

    const auto m = autocovariance(SpectralDensity::arma({}, {0.4}, 1.0), 4);
    CHECK(m[0] == Approx(1.16).epsilon(1e-13));
    CHECK(m[1] == Approx(0.4).epsilon(1e-13));
    CHECK(std::abs(m[2]) < 1e-13);
    CHECK(std::abs(m[3]) < 1e-13);

    const auto pw = SpectralDensity::piecewise({0.1, 0.3}, {4.0, 1.0, 0.5});
    const auto rp = autocovariance(pw, 6);
    // each level contributes 2 * integral of cos(2 pi f k) over its |f| band
    const double edges[] = {0.0, 0.1, 0.3, 0.5};
    const double levels[] = {4.0, 1.0, 0.5};
    for (int k = 0; k < 6; ++k) {
      double ref = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double w = 2.0 * oracle::kPi * k;
        ref += 2.0 * levels[i] *
               (k == 0 ? edges[i + 1] - edges[i] : (std::sin(w * edges[i + 1]) - std::sin(w * edges[i])) / w);
      }
      CHECK(rp[k] == Approx(ref).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("add and proportional") {
    const auto s = add(SpectralDensity::white(1.0), SpectralDensity::white(2.0));
    REQUIRE(s.is_white());
    CHECK(s(0.1) == 3.0);

    const auto p = add(SpectralDensity::piecewise({0.2}, {1.0, 2.0}), SpectralDensity::piecewise({0.3}, {5.0, 7.0}));
    CHECK(std::holds_alternative<PiecewiseConstant>(p.representation()));
    CHECK(p(0.1) == 6.0);
    CHECK(p(0.25) == 7.0);
    CHECK(p(0.4) == 9.0);

    const auto ar = SpectralDensity::arma({0.6}, {}, 1.0);
    const auto sum = add(ar, SpectralDensity::white(0.5));
    for (int j : {0, 700, 2047, 3300, 4095}) {
      const double f = -0.5 + j / 4095.0;
      CHECK(sum(f) == Approx(ar(f) + 0.5).epsilon(1e-12));
    }

    CHECK(proportional(ar, ar.scaled(3.0)));
    CHECK_FALSE(proportional(ar, SpectralDensity::white(1.0)));
  }

  TEST_CASE("band-limited sampling") {
    const ContinuousSpectralDensity flat(2.0, SpectralDensity::white(1.0));
    const auto s = sample_bandlimited(flat);
    REQUIRE(s.is_white());
    CHECK(s(0.0) == 4.0);

    const auto ar = SpectralDensity::arma({0.3}, {}, 1.0);
    const ContinuousSpectralDensity unit(0.5, ar);
    for (double f : {-0.5, -0.2, 0.0, 0.31}) CHECK(sample_bandlimited(unit)(f) == Approx(ar(f)).epsilon(1e-15));

    // triangle with a small pedestal on [-1, 1]
    const auto tri = SpectralDensity::tabulate([](double f) { return 0.05 + 1.0 - 2.0 * std::abs(f); }, 1025);
    const ContinuousSpectralDensity band(1.0, tri);
    const auto phi = sample_bandlimited(band);
    for (int i = 0; i <= 8; ++i) {
      const double f = -0.5 + i / 8.0;
      CHECK(phi(f) == Approx(2.0 * (0.05 + 1.0 - std::abs(2.0 * f))).epsilon(1e-12));
    }
    CHECK(band.power() == Approx(oracle::simpson([&](double f) { return band(f); }, -1.0, 1.0, 4096)).epsilon(1e-9));
    CHECK(band(1.5) == 0.0);
  }
}
