#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dpilab/dpi_engine.hpp"
#include "dpilab/errors.hpp"
#include "oracles.hpp"

using namespace dpilab;
using doctest::Approx;

namespace {

SpectralDensity half_band() { return SpectralDensity::piecewise({0.25}, {1.0, 3.0}); }

}  // namespace

TEST_SUITE("dpi_engine") {
  TEST_CASE("alpha coefficients") {
    const std::vector<SpectralDensity> same{SpectralDensity::white(1.0), SpectralDensity::white(1.0)};
    auto a = alpha_coefficients(same);
    CHECK(a[0] == Approx(0.5).epsilon(1e-14));
    CHECK(a[1] == Approx(0.5).epsilon(1e-14));

    const auto phi = SpectralDensity::arma({0.4}, {0.2}, 1.0);
    const std::vector<SpectralDensity> prop{phi, phi.scaled(3.0)};
    a = alpha_coefficients(prop);
    CHECK(a[0] == Approx(0.25).epsilon(1e-9));
    CHECK(a[1] == Approx(0.75).epsilon(1e-9));

    const std::vector<SpectralDensity> mixed{SpectralDensity::white(1.0), half_band()};
    a = alpha_coefficients(mixed);
    // ln(1/2) on half the band, ln(1/4) or ln(3/4) on the other half
    const double a0 = std::exp(0.5 * std::log(0.5) + 0.5 * std::log(0.25));
    const double a1 = std::exp(0.5 * std::log(0.5) + 0.5 * std::log(0.75));
    CHECK(a0 == Approx(std::pow(8.0, -0.5)));
    CHECK(a[0] == Approx(a0).epsilon(1e-12));
    CHECK(a[1] == Approx(a1).epsilon(1e-12));
    CHECK(a[0] + a[1] == Approx(0.965926).epsilon(1e-6));

    const std::vector<SpectralDensity> one{phi};
    CHECK_THROWS_AS(alpha_coefficients(one), DomainError);
  }

  TEST_CASE("divergence rates") {
    CHECK(divergence_rate(ProcessModel::gaussian(half_band())).value == 0.0);
    const auto u = divergence_rate(ProcessModel::iid(ScalarDistribution::uniform_unit_variance()));
    CHECK(u.value == Approx(0.176486).epsilon(2e-6));
    CHECK(u.method == "closed-form");

    MonteCarloOptions mc;
    mc.block_length = 64;
    mc.samples = 1000;
    const auto f = divergence_rate(
        ProcessModel::filtered_iid(ScalarDistribution::uniform_unit_variance(), {0.5}, {}), mc);
    CHECK(f.value == Approx(u.value).epsilon(1e-12));
    REQUIRE(f.cross_check.has_value());
    CHECK(std::abs(f.cross_check->value - u.value) <= f.cross_check->half_width);
    CHECK(f.cross_check->block_length == 64);
  }

  TEST_CASE("filtered-iid spectrum matches the filter") {
    const auto m = ProcessModel::filtered_iid(ScalarDistribution::laplace(1.0), {0.5}, {0.3});
    const auto ref = SpectralDensity::arma({0.5}, {0.3}, 2.0);
    for (double f : {0.0, 0.2, 0.5}) CHECK(m.spectrum()(f) == Approx(ref(f)).epsilon(1e-12));
    CHECK_THROWS_AS(ProcessModel::iid(ScalarDistribution::uniform(1.0), SpectralDensity::white(2.0)), InvariantError);
  }

  TEST_CASE("discrete inequality: Gaussian cases") {
    const auto phi = SpectralDensity::arma({0.3}, {}, 1.0);
    const std::vector<ProcessModel> prop{ProcessModel::gaussian(phi), ProcessModel::gaussian(phi.scaled(2.5))};
    const auto r = dpi_check_discrete(prop);
    CHECK(std::abs(r.margin) < 1e-6);
    CHECK(r.equality);
    CHECK(r.holds());
    CHECK(equality_condition(prop));

    const std::vector<ProcessModel> flat_step{ProcessModel::gaussian(SpectralDensity::white(1.0)),
                                              ProcessModel::gaussian(half_band())};
    const auto s = dpi_check_discrete(flat_step);
    CHECK(s.lhs == 1.0);
    CHECK(s.margin == Approx(1.0 - (std::pow(8.0, -0.5) + std::sqrt(3.0 / 8.0))).epsilon(1e-9));
    CHECK(s.margin == Approx(0.034074).epsilon(1e-5));
    CHECK_FALSE(s.equality);
    CHECK_FALSE(equality_condition(flat_step));
  }

  TEST_CASE("discrete inequality: uniform pair") {
    const auto u = ScalarDistribution::uniform_unit_variance();
    const std::vector<ProcessModel> m{ProcessModel::iid(u), ProcessModel::iid(u)};
    const auto r = dpi_check_discrete(m);
    // sum of two U[-a, a] is a triangle on [-2a, 2a] with variance 2
    const double a = std::sqrt(3.0);
    const double d_sum = oracle::gaussian_entropy(2.0) - oracle::triangle_entropy(a);
    const double d_u = oracle::gaussian_entropy(1.0) - oracle::uniform_entropy(a);
    const double expect = std::exp(-2.0 * d_sum) - std::exp(-2.0 * d_u);
    CHECK(r.margin == Approx(expect).epsilon(1e-6));
    CHECK(r.margin == Approx(0.252340).epsilon(1e-4));
    CHECK_FALSE(r.equality);
    CHECK(r.alphas[0] == Approx(0.5));
  }

  TEST_CASE("three equal IID models") {
    const auto l = ScalarDistribution::laplace_unit_variance();
    const std::vector<ProcessModel> m{ProcessModel::iid(l), ProcessModel::iid(l), ProcessModel::iid(l)};
    const auto r = dpi_check_discrete(m);
    for (double a : r.alphas) CHECK(a == Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.margin >= 0.0);
  }

  TEST_CASE("permutation invariance") {
    const std::vector<ProcessModel> a{ProcessModel::iid(ScalarDistribution::uniform(1.0)),
                                      ProcessModel::iid(ScalarDistribution::laplace(0.7)),
                                      ProcessModel::iid(ScalarDistribution::mixture({0.4, 0.6}, {-1.0, 0.5}, {0.2, 0.4}))};
    const std::vector<ProcessModel> b{a[2], a[0], a[1]};
    CHECK(std::abs(dpi_check_discrete(a).margin - dpi_check_discrete(b).margin) < 1e-12);
  }

  TEST_CASE("Monte Carlo sum and capability limits") {
    const std::vector<ProcessModel> mixed{ProcessModel::filtered_iid(ScalarDistribution::uniform_unit_variance(), {0.5}, {}),
                                          ProcessModel::gaussian(SpectralDensity::arma({-0.3}, {}, 1.0))};
    const auto r = dpi_check_discrete(mixed);
    CHECK(r.soft);
    CHECK(r.holds());
    CHECK(r.margin_half_width > 0.0);

    const std::vector<ProcessModel> two{mixed[0], ProcessModel::iid(ScalarDistribution::laplace(1.0))};
    CHECK_THROWS_AS(dpi_check_discrete(two), CapabilityError);
  }

  TEST_CASE("continuous inequality") {
    const std::vector<ContinuousProcessModel> flat{
        ContinuousProcessModel::iid(ScalarDistribution::uniform_unit_variance(), 0.5),
        ContinuousProcessModel::gaussian(ContinuousSpectralDensity(0.5, SpectralDensity::white(1.0)))};
    const std::vector<ProcessModel> sampled{flat[0].sampled(), flat[1].sampled()};
    const auto c = dpi_check_continuous(flat);
    const auto d = dpi_check_discrete(sampled);
    CHECK(c.per_sample.margin == Approx(d.margin).epsilon(1e-12));
    CHECK_FALSE(c.per_time.has_value());

    const std::vector<ContinuousProcessModel> shaped{
        ContinuousProcessModel::gaussian(ContinuousSpectralDensity(1.0, SpectralDensity::white(1.0))),
        ContinuousProcessModel::gaussian(ContinuousSpectralDensity(1.0, half_band()))};
    const auto s = dpi_check_continuous(shaped, Normalization::PerTime);
    CHECK(s.per_sample.margin > 0.0);
    REQUIRE(s.per_time.has_value());
    CHECK(s.per_time->normalization == "per-time");
    CHECK(s.scaling_residual < 1e-9);
    for (std::size_t i = 0; i < s.per_time->rhs_terms.size(); ++i)
      CHECK(s.per_time->rhs_terms[i] == Approx(std::pow(s.per_sample.rhs_terms[i], 2.0)).epsilon(1e-9));

    const std::vector<ContinuousProcessModel> mismatch{
        ContinuousProcessModel::gaussian(ContinuousSpectralDensity(1.0, SpectralDensity::white(1.0))),
        ContinuousProcessModel::gaussian(ContinuousSpectralDensity(2.0, SpectralDensity::white(1.0)))};
    CHECK_THROWS_AS(dpi_check_continuous(mismatch), DomainError);
  }

  TEST_CASE("iid sum sequences") {
    const auto g = iid_sum_divergence_sequence(ScalarDistribution::gaussian(1.0), 4);
    for (const auto& e : g.entries) CHECK(e.divergence < 1e-6);

    const auto u = iid_sum_divergence_sequence(ScalarDistribution::uniform_unit_variance(), 4);
    REQUIRE(u.entries.size() == 4);
    CHECK(u.bounded_by_first);
    CHECK(u.entries[0].divergence == Approx(0.176486).epsilon(1e-5));
    CHECK(u.entries[1].divergence == Approx(0.023059).epsilon(1e-4));

    const auto l = iid_sum_divergence_sequence(ScalarDistribution::laplace_unit_variance(), 3);
    CHECK(l.bounded_by_first);
    // D_2 against Simpson on the closed-form density of the normalized sum
    const double b = 1.0 / std::sqrt(2.0) / std::sqrt(2.0);
    const double ref = oracle::divergence_symmetric([&](double x) { return oracle::laplace_sum_pdf(x, b, 2); }, 1.0,
                                                    {0.0, 5.0, 15.0, 40.0});
    CHECK(l.entries[1].divergence == Approx(ref).epsilon(1e-5));
    CHECK_THROWS_AS(iid_sum_divergence_sequence(ScalarDistribution::uniform(1.0), 9), DomainError);
  }
}
