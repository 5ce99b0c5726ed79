#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dydap/analysis.hpp"

using namespace dydap;

namespace {

ExponentQuery uniform_query(double k) {
  ExponentQuery q;
  q.p = {0.25, 0.25, 0.25, 0.25};
  q.growth_factor = k;
  return q;
}

}  // namespace

TEST_CASE("uniform distributions hit the closed-form exponents") {
  CHECK(solve_size_exponent(uniform_query(1.5)) ==
        Catch::Approx(std::log(4.0) / std::log(6.0)).margin(1e-4));
  CHECK(solve_size_exponent(uniform_query(2.0)) ==
        Catch::Approx(2.0 / 3.0).margin(1e-4));
  CHECK(solve_size_exponent(uniform_query(4.0)) ==
        Catch::Approx(0.5).margin(1e-4));
  CHECK(solve_size_exponent(uniform_query(8.0)) ==
        Catch::Approx(0.4).margin(1e-4));
}

TEST_CASE("unit growth factor forces a linear summary") {
  CHECK(solve_size_exponent(uniform_query(1.0)) ==
        Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("skewed exponent regression value") {
  // Frozen from an independent high-precision root finder run ahead of the
  // implementation: p = (0.45, 0.25, 0.25, 0.05), k = 2.
  ExponentQuery q;
  q.p = {0.45, 0.25, 0.25, 0.05};
  q.growth_factor = 2.0;
  CHECK(solve_size_exponent(q) ==
        Catch::Approx(0.6438701202844759).margin(1e-9));
}

TEST_CASE("uniform bound values") {
  CHECK(uniform_bound(1.0) == Catch::Approx(1.0));
  CHECK(uniform_bound(2.0) == Catch::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(uniform_bound(0.5), std::invalid_argument);
}

TEST_CASE("solved exponents never exceed the uniform bound") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const double ks[] = {1.5, 2.0, 4.0, 8.0};
  for (int i = 0; i < 100; ++i) {
    ExponentQuery q;
    double sum = 0.0;
    for (double& pi : q.p) {
      pi = unit(rng);
      sum += pi;
    }
    for (double& pi : q.p) pi /= sum;
    q.growth_factor = ks[i % 4];
    const double s = solve_size_exponent(q);
    CHECK(s > 0.0);
    CHECK(s <= uniform_bound(q.growth_factor) + 1e-9);
  }
}

TEST_CASE("exponent is nonincreasing in the growth factor") {
  ExponentQuery q;
  q.p = {0.45, 0.25, 0.25, 0.05};
  double last = 2.0;
  for (double k : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0}) {
    q.growth_factor = k;
    const double s = solve_size_exponent(q);
    CHECK(s <= last + 1e-12);
    last = s;
  }
}

TEST_CASE("uniform exponent table spot values within 0.005") {
  const double expected[] = {0.77, 0.67, 0.50, 0.40};
  const double ks[] = {1.5, 2.0, 4.0, 8.0};
  for (int i = 0; i < 4; ++i)
    CHECK(solve_size_exponent(uniform_query(ks[i])) ==
          Catch::Approx(expected[i]).margin(0.005));
}

TEST_CASE("growth fit recovers exact power laws") {
  std::vector<GrowthSample> samples;
  for (std::uint64_t n : {100, 1000, 10000, 100000, 1000000})
    samples.push_back(
        {n, static_cast<std::uint64_t>(std::llround(std::sqrt(n)))});
  CHECK(fit_growth_exponent(samples) == Catch::Approx(0.5).margin(2e-3));

  std::vector<GrowthSample> exact;
  for (std::uint64_t n : {64, 256, 1024, 4096, 16384, 65536})
    exact.push_back({n, static_cast<std::uint64_t>(std::llround(
                            std::pow(static_cast<double>(n), 0.5)))});
  CHECK(fit_growth_exponent(exact) == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("constant node counts fit a zero exponent") {
  std::vector<GrowthSample> samples = {{100, 500}, {1000, 500}, {10000, 500}};
  CHECK(fit_growth_exponent(samples) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("degenerate growth samples are rejected") {
  CHECK_THROWS_AS(fit_growth_exponent({{100, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_growth_exponent({{100, 5}, {100, 6}}),
                  std::invalid_argument);
}

TEST_CASE("query validation") {
  ExponentQuery q;
  q.p = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(solve_size_exponent(q), std::invalid_argument);
  q.p = {0.25, 0.25, 0.25, 0.25};
  q.growth_factor = 0.9;
  CHECK_THROWS_AS(solve_size_exponent(q), std::invalid_argument);
}
