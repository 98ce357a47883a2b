#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "support.hpp"
#include "wfpl/error.hpp"
#include "wfpl/kernel.hpp"

using namespace wfpl;
using boost::math::quadrature::gauss_kronrod;
using test::spec;

namespace {

double gk(auto f, double a, double b) { return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13); }

// Nested adaptive oracle for separated intervals.
double pair_oracle(double a, double b, double c, double d, double gamma, double beta) {
  return gk(
      [=](double x) {
        return gk([=](double y) { return std::pow(std::abs(x - y), -gamma) * std::pow(std::abs(y), -beta); }, c, d) *
               std::pow(std::abs(x), -beta);
      },
      a, b);
}

// Tail of [a, b] inside (0, R): exterior y in (R, inf) on both sides. The
// near side uses y = R + d w, d = R - x, which isolates the factor d^{1-gamma};
// d is taken from the endpoint distance to avoid cancellation.
double tail_oracle(double a, double b, double R, double gamma, double beta) {
  boost::math::quadrature::exp_sinh<double> es;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double inf = std::numeric_limits<double>::infinity();
  return ts.integrate(
      [&](double x, double xc) {
        const double d = xc > 0.0 ? (R - b) + xc : R - x;
        const double near =
            std::pow(d, 1.0 - gamma) *
            es.integrate([&](double w) { return std::pow(1.0 + w, -gamma) * std::pow(R + d * w, -beta); }, 0.0, inf);
        const double far =
            es.integrate([&](double u) { return std::pow(R + u + x, -gamma) * std::pow(R + u, -beta); }, 0.0, inf);
        return (near + far) * std::pow(std::abs(x), -beta);
      },
      a, b);
}

// Pair touching at c > 0: x = c - u, y = c + v, split along v = u into
// (u, v) = (r, t r) and (t r, r).
double touching_oracle(double c, double h, double gamma, double beta) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto weight = [=](double u, double v) { return std::pow(c - u, -beta) * std::pow(c + v, -beta); };
  return ts.integrate(
      [&](double r) {
        const double inner = gk(
            [&](double t) { return std::pow(1.0 + t, -gamma) * (weight(r, t * r) + weight(t * r, r)); }, 0.0, 1.0);
        return std::pow(r, 1.0 - gamma) * inner;
      },
      0.0, h);
}

// int_0^1 int_1^2 (y - x)^{-gamma} dy dx
double touching_unit_exact(double gamma) {
  return (std::pow(2.0, 2.0 - gamma) - 2.0) / ((1.0 - gamma) * (2.0 - gamma));
}

}  // namespace

TEST_CASE("pair and tail weights are symmetric under i <-> j and x -> -x") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 16));
  const std::size_t n = K.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(K.weight(i, i) == 0.0);
    CHECK(test::rel_err(K.tail_weights[i], K.tail_weights[n - 1 - i]) < 1e-12);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(K.weight(i, j) == K.weight(j, i));
      if (i != j) CHECK(test::rel_err(K.weight(i, j), K.weight(n - 1 - i, n - 1 - j)) < 1e-12);
    }
  }
}

TEST_CASE("separated pairs match nested Gauss-Kronrod") {
  for (double beta : {0.0, 0.05, 0.1}) {
    const double gamma = 1.6;
    CHECK(test::rel_err(pair_integral(0.1, 0.3, 0.5, 0.7, gamma, beta), pair_oracle(0.1, 0.3, 0.5, 0.7, gamma, beta)) <
          1e-6);
    CHECK(test::rel_err(pair_integral(-0.9, -0.6, 0.2, 0.4, gamma, beta),
                        pair_oracle(-0.9, -0.6, 0.2, 0.4, gamma, beta)) < 1e-6);
  }
}

TEST_CASE("assembled weight for cells (0.25,0.5) x (0.75,1.0)") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.0), 8));
  CHECK(test::rel_err(K.weight(5, 7), pair_oracle(0.25, 0.5, 0.75, 1.0, 1.8, 0.0)) < 1e-6);
}

TEST_CASE("origin pair reduces to a one-dimensional integral") {
  // int_0^L int_0^L (x+y)^{-g} (xy)^{-b} = 2 L^a / a int_0^1 (1+t)^{-g} t^{-b} dt, a = 2 - g - 2b
  boost::math::quadrature::tanh_sinh<double> ts;
  for (auto [gamma, beta] : {std::pair{1.8, 0.05}, std::pair{1.6, 0.1}, std::pair{1.5, 0.2}}) {
    const double L = 0.125;
    const double a = 2.0 - gamma - 2.0 * beta;
    const double I = ts.integrate([=](double t) { return std::pow(1.0 + t, -gamma) * std::pow(t, -beta); }, 0.0, 1.0);
    const double ref = 2.0 * std::pow(L, a) / a * I;
    CHECK(test::rel_err(pair_integral(-L, 0.0, 0.0, L, gamma, beta), ref) < 1e-8);
  }
}

TEST_CASE("touching pair at beta = 0 against the closed form") {
  for (double gamma : {1.2, 1.6, 1.9, 1.95})
    CHECK(test::rel_err(pair_integral(0.0, 1.0, 1.0, 2.0, gamma, 0.0), touching_unit_exact(gamma)) < 1e-12);
}

TEST_CASE("touching pair away from the origin with beta > 0") {
  for (double beta : {0.05, 0.1}) {
    const double ref = touching_oracle(0.5, 0.25, 1.5, beta);
    CHECK(test::rel_err(pair_integral(0.25, 0.5, 0.5, 0.75, 1.5, beta), ref) < 1e-8);
  }
}

TEST_CASE("tail weights match an exterior oracle") {
  for (double beta : {0.0, 0.05}) {
    const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, beta), 8));
    const double gamma = 1.8;
    for (std::size_t i = 4; i < 8; ++i) {
      const Cell& c = K.grid->cell(i);
      CHECK(test::rel_err(K.tail_weights[i], tail_oracle(c.lower, c.upper, 1.0, gamma, beta)) < 1e-7);
    }
    CHECK(K.truncation_error_bound > 0.0);
    CHECK(K.truncation_error_bound < 1e-6);
  }
}

TEST_CASE("tail weights at beta = 0 integrate the closed-form exterior interaction") {
  const ProblemSpec sp = spec(2.0, 0.4, 0.0);
  const KernelMatrix K = assemble_kernel(make_grid(sp, 8));
  const double ps = sp.ps();
  auto primitive = [ps](double x) { return (std::pow(1.0 + x, 1.0 - ps) - std::pow(1.0 - x, 1.0 - ps)) / (ps * (1.0 - ps)); };
  for (std::size_t i = 0; i < 8; ++i) {
    const Cell& c = K.grid->cell(i);
    CHECK(test::rel_err(K.tail_weights[i], primitive(c.upper) - primitive(c.lower)) < 1e-9);
  }
}

TEST_CASE("doubling the exterior radius leaves the tail unchanged") {
  ProblemSpec s = spec(1.5, 0.4, 0.1);
  const KernelMatrix a = assemble_kernel(make_grid(s, 16));
  s.exterior_radius *= 2.0;
  const KernelMatrix b = assemble_kernel(make_grid(s, 16));
  for (std::size_t i = 0; i < 16; ++i) CHECK(test::rel_err(a.tail_weights[i], b.tail_weights[i]) < 1e-8);
}

TEST_CASE("raising the quadrature order changes weights below 1e-8") {
  const GridPtr g = make_grid(spec(3.0, 0.25, 0.05), 16);
  const KernelMatrix a = assemble_kernel(g, {.quadrature_order = 10});
  const KernelMatrix b = assemble_kernel(g, {.quadrature_order = 14});
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(test::rel_err(a.tail_weights[i], b.tail_weights[i]) < 1e-8);
    for (std::size_t j = 0; j < 16; ++j)
      if (i != j) CHECK(test::rel_err(a.weight(i, j), b.weight(i, j)) < 1e-8);
  }
}

TEST_CASE("dilation scales weights by lambda^{N-ps} at beta = 0") {
  ProblemSpec s = spec(2.0, 0.4, 0.0);
  const KernelMatrix a = assemble_kernel(make_grid(s, 8));
  const double lam = 3.0;
  s.domain_radius *= lam;
  s.exterior_radius *= lam;
  const KernelMatrix b = assemble_kernel(make_grid(s, 8));
  const double factor = std::pow(lam, 1.0 - s.ps());
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(test::rel_err(b.tail_weights[i], factor * a.tail_weights[i]) < 1e-9);
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j) CHECK(test::rel_err(b.weight(i, j), factor * a.weight(i, j)) < 1e-9);
  }
}

TEST_CASE("exterior interaction and its supremum") {
  const ProblemSpec s = spec(2.0, 0.4, 0.0);
  CHECK(exterior_interaction(0.0, s) == doctest::Approx(2.5).epsilon(1e-15));
  double prev = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double v = exterior_interaction(k / 10.0, s);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(exterior_interaction(1.0, s), DomainError);

  const Grid g = build_grid(spec(2.0, 0.3, 0.0), 10);
  for (double r : {0.05, 0.3, 0.5, 0.95}) {
    double brute = exterior_interaction(0.0, g.spec());
    for (const Cell& c : g.cells())
      if (std::abs(c.center) < r) brute = std::max(brute, exterior_interaction(c.center, g.spec()));
    CHECK(tail_supremum(g, r) == brute);
  }
  CHECK(tail_supremum(g, 0.05) == exterior_interaction(0.0, g.spec()));
  CHECK_THROWS_AS(tail_supremum(g, 1.0), DomainError);
}
