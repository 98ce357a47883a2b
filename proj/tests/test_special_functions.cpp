#include <cmath>
#include <numbers>

#include <boost/math/quadrature/trapezoidal.hpp>

#include "doctest.h"
#include "support.hpp"
#include "wfpl/error.hpp"
#include "wfpl/special_functions.hpp"

using namespace wfpl;
constexpr double pi = std::numbers::pi;

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-15));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_area(0), DomainError);
}

TEST_CASE("K at sigma = 0 is the sphere area") {
  for (double theta : {0.1, 0.3, 1.5}) CHECK(kernel_K(0.0, 2, theta) == doctest::Approx(2.0 * pi).epsilon(1e-12));
  CHECK(kernel_K(0.0, 3, 0.5) == doctest::Approx(4.0 * pi).epsilon(1e-12));
}

TEST_CASE("one-dimensional K is a two-point sum") {
  for (double sigma : {0.0, 0.3, 0.9, 1.5, 40.0}) {
    const double theta = 0.4;
    const double ref = std::pow(std::abs(1.0 - sigma), theta - 1.0) + std::pow(1.0 + sigma, theta - 1.0);
    CHECK(test::rel_err(kernel_K(sigma, 1, theta), ref) < 1e-15);
  }
  CHECK(test::rel_err(kernel_D(2.0, 1, 0.8), std::pow(1.0, -1.8) + std::pow(3.0, -1.8)) < 1e-15);
}

TEST_CASE("two-dimensional K against the periodic trapezoidal rule") {
  for (double sigma : {0.2, 0.7, 1.4, 5.0}) {
    for (double theta : {0.3, 1.2}) {
      auto f = [=](double xi) { return std::pow(1.0 - 2.0 * sigma * std::cos(xi) + sigma * sigma, -(2.0 - theta) / 2.0); };
      const double ref = boost::math::quadrature::trapezoidal(f, 0.0, 2.0 * pi, 1e-14);
      CHECK(test::rel_err(kernel_K(sigma, 2, theta), ref) < 1e-9);
    }
  }
}

TEST_CASE("three-dimensional K against its closed form") {
  for (double sigma : {0.2, 0.7, 1.4, 5.0}) {
    const double theta = 0.6;
    const double m = (3.0 - theta) / 2.0;
    const double ref = 2.0 * pi * (std::pow(std::abs(1.0 - sigma), 2.0 - 2.0 * m) - std::pow(1.0 + sigma, 2.0 - 2.0 * m)) /
                       (2.0 * sigma * (m - 1.0));
    CHECK(test::rel_err(kernel_K(sigma, 3, theta), ref) < 1e-9);
  }
}

TEST_CASE("D is positive and decays beyond tau = 1") {
  double prev = kernel_D(1.1, 2, 0.8);
  CHECK(prev > 0.0);
  for (double tau : {1.5, 2.0, 4.0, 10.0}) {
    const double d = kernel_D(tau, 2, 0.8);
    CHECK(d > 0.0);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("asymptotic exponents") {
  const KernelAsymptotics a = fit_kernel_asymptotics(2, 0.3, 0.0);
  CHECK(std::abs(a.near_one.slope - (-0.7)) < 0.05);
  CHECK(std::abs(a.at_infinity.slope - (-0.7)) < 0.05);
  const KernelAsymptotics b = fit_kernel_asymptotics(2, 0.3, 0.2);
  CHECK(std::abs(b.at_infinity.slope - (-0.9)) < 0.05);
}

TEST_CASE("tabulation") {
  const SpecialFnTable t = tabulate_special_functions(2, 0.3, 0.8, {0.0, 0.5, 2.0}, {1.5, 3.0});
  REQUIRE(t.K.size() == 3);
  REQUIRE(t.D.size() == 2);
  CHECK(t.K[0] == doctest::Approx(2.0 * pi));
  for (double k : t.K) CHECK(k > 0.0);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(kernel_K(1.0, 2, 0.3), SingularityError);
  CHECK_THROWS_AS(kernel_K(0.5, 2, 2.0), DomainError);
  CHECK_THROWS_AS(kernel_K(0.5, 2, 0.0), DomainError);
  CHECK_THROWS_AS(kernel_K(-0.5, 2, 0.3), DomainError);
  CHECK_THROWS_AS(kernel_D(1.0, 2, 0.8), SingularityError);
  CHECK_THROWS_AS(kernel_D(2.0, 2, 0.0), DomainError);
}
