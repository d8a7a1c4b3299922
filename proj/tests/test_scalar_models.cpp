#include "doctest.h"

#include <cmath>
#include <random>

#include "dpilab/errors.hpp"
#include "dpilab/scalar_models.hpp"
#include "oracles.hpp"

using namespace dpilab;
using doctest::Approx;

TEST_SUITE("scalar_models") {
  TEST_CASE("closed-form entropies") {
    const auto u = ScalarDistribution::uniform_unit_variance();
    CHECK(u.variance() == Approx(1.0).epsilon(1e-15));
    CHECK(differential_entropy(u) == Approx(1.242453).epsilon(1e-6));
    CHECK(differential_entropy(u) == Approx(oracle::uniform_entropy(std::sqrt(3.0))).epsilon(1e-14));
    const auto l = ScalarDistribution::laplace_unit_variance();
    CHECK(differential_entropy(l) == Approx(1.346574).epsilon(1e-6));
    CHECK(divergence_from_matched_gaussian(l) == Approx(0.072365).epsilon(1e-5));
    CHECK(divergence_from_matched_gaussian(u) == Approx(0.176485).epsilon(1e-5));
    CHECK(divergence_from_matched_gaussian(ScalarDistribution::gaussian(3.0)) == 0.0);
  }

  TEST_CASE("mixture entropy against Simpson") {
    const auto m = ScalarDistribution::mixture({0.3, 0.7}, {-1.0, 2.0}, {0.5, 1.5});
    CHECK(m.mean() == Approx(0.3 * -1.0 + 0.7 * 2.0));
    const double ref = -oracle::simpson(
        [&](double x) {
          const double p = 0.3 * oracle::normal_pdf(x + 1.0, 0.5) + 0.7 * oracle::normal_pdf(x - 2.0, 1.5);
          return p > 0 ? p * std::log(p) : 0.0;
        },
        -25.0, 25.0, 100000);
    CHECK(differential_entropy(m) == Approx(ref).epsilon(1e-9));
  }

  TEST_CASE("convolution of Gaussians") {
    const auto s = convolve(ScalarDistribution::gaussian(1.0), ScalarDistribution::gaussian(2.0));
    CHECK(s.variance() == Approx(3.0).epsilon(1e-6));
    for (double x : {-4.0, -1.0, 0.0, 0.5, 3.0}) CHECK(std::abs(s.pdf(x) - oracle::normal_pdf(x, 3.0)) < 1e-6);
    CHECK(divergence_from_matched_gaussian(s) < 1e-6);
  }

  TEST_CASE("convolution against direct summation") {
    const double h = 0.01;
    std::vector<double> a, b;
    for (int j = 0; j <= 200; ++j) a.push_back(oracle::normal_pdf(-1.0 + j * h, 0.1));
    for (int j = 0; j <= 300; ++j) b.push_back(std::exp(-std::abs(-1.5 + j * h) / 0.3) / 0.6);
    for (auto* v : {&a, &b}) {
      double mass = 0.0;
      for (double x : *v) mass += x * h;
      for (double& x : *v) x /= mass;
    }
    const auto ga = ScalarDistribution::grid(-1.0, h, a);
    const auto gb = ScalarDistribution::grid(-1.5, h, b);
    // a coarse target keeps the convolution on the inputs' own step
    GridOptions coarse;
    coarse.points = 2;
    const auto s = convolve(ga, gb, coarse);
    auto ra = std::get<GridDensity>(ga.representation()).values;
    auto rb = std::get<GridDensity>(gb.representation()).values;
    const auto direct = oracle::convolve(ra, rb, h);
    for (double x : {-1.5, -0.3, 0.0, 0.42, 1.2}) {
      const double idx = (x + 2.5) / h;
      const auto j = static_cast<std::size_t>(std::lround(idx));
      CHECK(s.pdf(-2.5 + j * h) == Approx(direct[j]).epsilon(1e-6));
    }
  }

  TEST_CASE("mixture variances add under convolution") {
    const auto m = ScalarDistribution::mixture({0.5, 0.5}, {-1.0, 1.0}, {0.3, 0.3});
    const auto u = ScalarDistribution::uniform(1.0);
    const auto s = convolve(m, u);
    CHECK(s.variance() == Approx(m.variance() + u.variance()).epsilon(1e-6));
    const auto t = convolve(u, m);
    CHECK(differential_entropy(s) == Approx(differential_entropy(t)).epsilon(1e-12));
  }

  TEST_CASE("uniform sums: triangle entropy and shrinking divergence") {
    const auto u = ScalarDistribution::uniform(1.0);
    const auto tri = convolve(u, u);
    CHECK(differential_entropy(tri) == Approx(oracle::triangle_entropy(1.0)).epsilon(1e-6));
    const double d2 = divergence_from_matched_gaussian(normalized_iid_sum(u, 2));
    const double d4 = divergence_from_matched_gaussian(normalized_iid_sum(u, 4));
    CHECK(d4 < d2);
    CHECK(d2 < divergence_from_matched_gaussian(u));
  }

  TEST_CASE("sampling moments") {
    std::mt19937_64 rng(7);
    const auto l = ScalarDistribution::laplace(0.5);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = l.sample(rng);
      s += x;
      s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(s2 / n == Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("cdf, support and scaling") {
    const auto u = ScalarDistribution::uniform(2.0);
    CHECK(u.cdf(0.0) == Approx(0.5));
    CHECK(u.cdf(1.0) == Approx(0.75));
    const auto sup = ScalarDistribution::gaussian(1.0).support();
    CHECK(sup.first < -7.0);
    CHECK(sup.second > 7.0);
    const auto l = ScalarDistribution::laplace(1.0).scaled(-3.0);
    CHECK(l.variance() == Approx(18.0));
    CHECK(divergence_from_matched_gaussian(l) == Approx(divergence_from_matched_gaussian(ScalarDistribution::laplace(1.0))));
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(ScalarDistribution::uniform(0.0), DomainError);
    CHECK_THROWS_AS(ScalarDistribution::mixture({0.5, 0.6}, {0.0, 0.0}, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(ScalarDistribution::grid(0.0, 0.1, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(normalized_iid_sum(ScalarDistribution::uniform(1.0), 0), DomainError);
    GridOptions tiny;
    tiny.points = 64;
    tiny.max_points = 32;
    CHECK_THROWS_AS(convolve(ScalarDistribution::uniform(1.0), ScalarDistribution::laplace(1.0), tiny), NumericalError);
  }
}
