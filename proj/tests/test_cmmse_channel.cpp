#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dpilab/cmmse_channel.hpp"
#include "dpilab/errors.hpp"
#include "oracles.hpp"

using namespace dpilab;
using doctest::Approx;

namespace {

const double quarter = std::numbers::pi / 4.0;

}  // namespace

TEST_SUITE("cmmse_channel") {
  TEST_CASE("channel divergence and monotonicity") {
    const std::vector<double> l{1.0};
    CHECK(channel_divergence_gaussian(l, 1.0) == Approx(0.5 * (1.0 - std::log(2.0))).epsilon(1e-14));
    CHECK(channel_divergence_gaussian(l, 1e-9) == Approx(0.25e-18).epsilon(1e-6));
    std::vector<double> lam{0.3, 2.0};
    for (double q = 0.1; q < 50.0; q *= 1.7) {
      const double base = channel_divergence_gaussian(lam, q);
      CHECK(channel_divergence_gaussian(lam, q * 1.01) >= base);
      for (std::size_t i = 0; i < lam.size(); ++i) {
        auto bumped = lam;
        bumped[i] *= 1.01;
        CHECK(channel_divergence_gaussian(bumped, q) >= base);
      }
    }
  }

  TEST_CASE("CMMSE trajectory") {
    const auto t = gaussian_cmmse_trajectory(1.0, 1.0, 1.0, 4096);
    CHECK(t.integrated == Approx(std::log(2.0)).epsilon(1e-3));
    for (std::size_t k = 0; k < t.times.size(); k += 512)
      CHECK(t.mmse[k] == Approx(1.0 / (1.0 + t.times[k])).epsilon(1e-3));
    const auto tiny = gaussian_cmmse_trajectory(2.0, 1e-8, 1.0, 256);
    CHECK(tiny.integrated == Approx(2.0).epsilon(1e-6));
    // (q/2)(lambda T - integrated) against the closed-form divergence
    for (double q : {0.5, 1.0, 4.0}) {
      const auto tr = gaussian_cmmse_trajectory(1.5, q, 1.0, 4096);
      const std::vector<double> l{1.5};
      CHECK(std::abs(0.5 * q * (1.5 - tr.integrated) - channel_divergence_gaussian(l, q)) < 1e-3);
    }
    CHECK_THROWS_AS(gaussian_cmmse_trajectory(1.0, 1.0, 1.0, 8), DomainError);
  }

  TEST_CASE("worked tuple") {
    const std::vector<double> u{1.0}, v{4.0};
    const auto c = cmmse_combination_check(u, v, quarter, 1.0);
    CHECK(c.lhs == Approx(std::log(3.5)).epsilon(1e-13));
    CHECK(c.rhs == Approx(0.5 * std::log(2.0) + 0.5 * std::log(5.0)).epsilon(1e-13));
    CHECK(c.lhs == Approx(1.2528).epsilon(1e-4));
    CHECK(c.rhs == Approx(1.1513).epsilon(1e-4));
    CHECK(c.holds);
    const auto d = divergence_combination_check(u, v, quarter, 1.0);
    CHECK(d.lhs == Approx(0.5 * (2.5 - std::log(3.5))).epsilon(1e-13));
    CHECK(d.rhs == Approx(0.25 * (1.0 - std::log(2.0)) + 0.25 * (4.0 - std::log(5.0))).epsilon(1e-13));
    CHECK(d.holds);
  }

  TEST_CASE("equality cases") {
    const std::vector<double> u{0.5, 2.0}, v{3.0, 0.1};
    CHECK(std::abs(cmmse_combination_check(u, v, 0.0, 2.0).margin) < 1e-12);
    CHECK(std::abs(cmmse_combination_check(u, u, 0.7, 2.0).margin) < 1e-12);
    CHECK(std::abs(divergence_combination_check(u, v, 0.0, 2.0).margin) < 1e-12);
    CHECK(std::abs(divergence_combination_check(u, u, 0.7, 2.0).margin) < 1e-12);
    const std::vector<double> short_v{1.0};
    CHECK_THROWS_AS(cmmse_combination_check(u, short_v, 0.3, 1.0), DomainError);
  }

  TEST_CASE("high-SNR limit") {
    const std::vector<double> u{1.0}, v{4.0}, ladder{1.0, 10.0, 100.0, 1e3, 1e4};
    const auto t = high_snr_limit_check(u, v, quarter, ladder);
    CHECK(t.limit == Approx(0.5 * std::log(2.5 / 2.0)).epsilon(1e-12));
    CHECK(t.limit == Approx(0.111572).epsilon(1e-6));
    CHECK(t.gap_decreasing);
    CHECK(std::abs(t.rows.back().gap) <= 1e-2);
    CHECK(t.tail_ratio >= 0.05);
    CHECK(t.tail_ratio <= 0.2);
    const auto same = high_snr_limit_check(u, u, 0.4, ladder);
    for (const auto& r : same.rows) CHECK(std::abs(r.gap) < 1e-14);
  }

  TEST_CASE("scalar channel limit") {
    const std::vector<double> ladder{1.0, 10.0, 100.0, 1e3, 1e4};
    const auto g = scalar_channel_divergence_limit(ScalarDistribution::gaussian(1.0), ladder);
    for (const auto& r : g.rows) CHECK(std::abs(r.value) < 1e-9);
    const auto t = scalar_channel_divergence_limit(ScalarDistribution::uniform_unit_variance(), ladder);
    CHECK(t.monotone);
    CHECK_FALSE(t.truncated);
    CHECK(t.limit == Approx(0.176486).epsilon(1e-5));
    CHECK(std::abs(t.rows.back().value - t.limit) <= 0.05);
    // q = 1: Simpson on the Gaussian-smoothed uniform density
    const double a = std::sqrt(3.0);
    const double ref = oracle::divergence_symmetric([&](double y) { return oracle::smoothed_uniform_pdf(y, a, 1.0); },
                                                    2.0, {0.0, 3.0, 8.0, 14.0}, 600);
    CHECK(t.rows.front().value == Approx(ref).epsilon(1e-6));
  }

  TEST_CASE("EPI via CMMSE demo") {
    const auto g = epi_from_cmmse_demo(ScalarDistribution::gaussian(1.0), ScalarDistribution::gaussian(1.0), 0.6);
    CHECK(std::abs(g.margin) < 1e-4);
    const auto l = ScalarDistribution::laplace(1.0);
    CHECK(std::abs(epi_from_cmmse_demo(l, ScalarDistribution::uniform(1.0), 0.0).margin) < 1e-12);
    const auto u = ScalarDistribution::uniform_unit_variance();
    const auto r = epi_from_cmmse_demo(u, u, quarter);
    CHECK(r.lhs == Approx(oracle::triangle_entropy(std::sqrt(3.0)) - 0.5 * std::log(2.0)).epsilon(1e-6));
    CHECK(r.lhs == Approx(1.395880).epsilon(1e-5));
    CHECK(r.rhs == Approx(1.242453).epsilon(1e-6));
    CHECK(r.holds);
  }

  TEST_CASE("path simulation") {
    PathSimulationOptions o;
    o.paths = 2000;
    o.steps = 1024;
    o.seed = 11;
    const auto one = simulate_cmmse_paths(1.0, 2.0, o);
    o.jobs = 4;
    const auto four = simulate_cmmse_paths(1.0, 2.0, o);
    CHECK(one.within);
    CHECK(one.empirical == four.empirical);
    for (std::size_t i = 0; i < one.times.size(); ++i)
      CHECK(one.theoretical[i] == Approx(1.0 / (1.0 + 2.0 * one.times[i])).epsilon(1e-12));
  }

  TEST_CASE("configuration validation") {
    ChannelConfig c;
    c.lambda_u = {1.0};
    c.lambda_v = {1.0, 2.0};
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.lambda_v = {2.0};
    c.alpha = 2.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.alpha = quarter;
    CHECK_NOTHROW(c.validate());
    CHECK(c.lambda_z()[0] == Approx(1.5));
  }
}
