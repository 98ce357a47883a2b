#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "wfpl/entropy.hpp"
#include "wfpl/error.hpp"
#include "wfpl/reaction.hpp"
#include "wfpl/solver.hpp"

using namespace wfpl;
using test::spec;

TEST_CASE("lambda_bar formula") {
  CHECK(superlinear_lambda_bar(2.0, 2.0) == 0.25);
  for (double q : {1.5, 2.0, 3.0})
    for (double p : {1.5, 2.0, 3.0}) CHECK(superlinear_lambda_bar(q, p) == std::pow(2.0, q / (1.0 - p)));
}

TEST_CASE("zero data is a fixed point") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 16));
  const ReactionOutcome o = monotone_iterate(DiscreteFunction::zeros(K.grid), 3.0, 2.0, K);
  CHECK(o.status == ReactionStatus::converged);
  REQUIRE(o.solution);
  CHECK(o.solution->max_abs() == 0.0);
  for (double n : o.iterate_norms) CHECK(n == 0.0);
}

TEST_CASE("sublinear reaction converges for every tested lambda") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 32));
  const DiscreteFunction g = spike_data(K.grid);
  for (double lambda : {0.1, 1.0, 10.0}) {
    const ReactionOutcome o = monotone_iterate(g, lambda, 0.5, K);
    CHECK(o.status == ReactionStatus::converged);
    CHECK(o.residual <= o.tolerance);
    for (std::size_t i = 1; i < o.iterate_norms.size(); ++i) CHECK(o.iterate_norms[i] >= o.iterate_norms[i - 1]);
  }
}

TEST_CASE("eigenvalue dichotomy with geometric growth at p = 2") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 32));
  const double l1 = first_eigenvalue(K).lambda1;
  const DiscreteFunction g = spike_data(K.grid);
  const ReactionOutcome below = monotone_iterate(g, 0.5 * l1, 1.0, K);
  CHECK(below.status == ReactionStatus::converged);
  CHECK(minimality_check(*below.solution, g, 0.5 * l1, 1.0, K).passed());

  const ReactionOutcome above = monotone_iterate(g, 1.5 * l1, 1.0, K);
  CHECK(above.status == ReactionStatus::diverged);
  const auto& n = above.iterate_norms;
  REQUIRE(n.size() > 4);
  CHECK(std::abs(n.back() / n[n.size() - 2] - 1.5) < 0.02);
}

TEST_CASE("regime classification") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 16));
  const ProblemSpec& s = K.grid->spec();
  const DiscreteFunction g = spike_data(K.grid);
  const DiscreteFunction w = solve_dirichlet(g, K).solution;
  CHECK(regime_classify(1.0, 0.5, s, 10.0, g, w).regime == Regime::sublinear);
  CHECK(regime_classify(5.0, 1.0, s, 10.0, g, w).regime == Regime::eigenvalue_subcritical);
  CHECK(regime_classify(15.0, 1.0, s, 10.0, g, w).regime == Regime::eigenvalue_supercritical);
  const RegimeReport failed = regime_classify(0.1, 3.0, s, 10.0, g, w);
  CHECK(failed.regime == Regime::superlinear_condition_failed);
  REQUIRE(failed.witness_cell);
  CHECK(std::pow(w[*failed.witness_cell], 3.0) > g[*failed.witness_cell]);
  CHECK(failed.worst_excess > 0.0);

  const DiscreteFunction a = admissible_constant_data(K, 2.0);
  const DiscreteFunction wa = solve_dirichlet(a, K).solution;
  const RegimeReport ok = regime_classify(0.2, 2.0, s, 10.0, a, wa);
  CHECK(ok.regime == Regime::superlinear_ok);
  CHECK(*ok.lambda_bar == 0.25);
  CHECK(regime_classify(0.3, 2.0, s, 10.0, a, wa).regime == Regime::superlinear_condition_failed);
}

TEST_CASE("superlinear iteration below lambda_bar") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 32));
  const DiscreteFunction a = admissible_constant_data(K, 2.0);
  const ReactionOutcome o = monotone_iterate(a, 0.25, 2.0, K);
  CHECK(o.status == ReactionStatus::converged);
  REQUIRE(o.lambda_bar);
  CHECK(*o.lambda_bar == 0.25);
  CHECK(minimality_check(*o.solution, a, 0.25, 2.0, K).passed());
  CHECK(monotone_iterate(a, 50.0, 2.0, K).status == ReactionStatus::diverged);
}

TEST_CASE("supersolution bound") {
  for (const ProblemSpec& s : test::golden_specs()) {
    const KernelMatrix K = assemble_kernel(make_grid(s, 16));
    const double q = s.p;  // any q > p - 1
    const EstimateReport r = supersolution_check(admissible_constant_data(K, q), q, K);
    CHECK(r.values.at("bound_factor") == std::pow(2.0, s.p - 1.0));
    CHECK(r.values.at("homogeneity_factor") == std::pow(2.0, 1.0 / (s.p - 1.0)));
    CHECK(r.values.at("max_v_minus_homogeneity_w") <= 1e-7);
    CHECK(r.values.at("max_supersolution_deficit") <= 1e-7);
    // v <= S(2g) = 2^{1/(p-1)} w, and 2^{p-1} is only the larger factor for p >= 2
    if (s.p >= 2.0) {
      CHECK(r.passed());
      CHECK(r.values.at("max_v_minus_factor_w") <= 1e-7);
    } else {
      CHECK(r.status == Status::violated);
    }
  }
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 16));
  const EstimateReport zero = supersolution_check(DiscreteFunction::zeros(K.grid), 2.0, K);
  CHECK(zero.passed());
  CHECK(zero.values.at("v_sup") == 0.0);
  CHECK_THROWS_AS(supersolution_check(spike_data(K.grid), 0.5, K), DomainError);
}

TEST_CASE("random admissible data") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> d(1.0, 3.0);
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 16));
  const double eps = admissible_constant_data(K, 2.0)[0];
  for (int trial = 0; trial < 5; ++trial) {
    DiscreteFunction g = DiscreteFunction::zeros(K.grid);
    // w(c g) scales linearly at p = 2, so data between eps and 3 eps with w^q <= g is checked below
    for (double& x : g.values) x = eps * d(rng);
    const DiscreteFunction w = solve_dirichlet(g, K).solution;
    bool admissible = true;
    for (std::size_t i = 0; i < 16; ++i) admissible = admissible && w[i] * w[i] <= g[i];
    if (admissible) CHECK(supersolution_check(g, 2.0, K).passed());
  }
}

TEST_CASE("invalid reaction input") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 8));
  DiscreteFunction g = DiscreteFunction::constant(K.grid, 1.0);
  g[0] = -1.0;
  CHECK_THROWS_AS(monotone_iterate(g, 1.0, 2.0, K), DomainError);
  CHECK_THROWS_AS(monotone_iterate(DiscreteFunction::zeros(K.grid), -1.0, 2.0, K), DomainError);
  CHECK_THROWS_AS(monotone_iterate(DiscreteFunction::zeros(K.grid), 1.0, 0.0, K), DomainError);
}

TEST_CASE("Stampacchia recursion exponent") {
  ProblemSpec two = spec(2.0, 0.5, 0.0);
  two.dim = 2;
  CHECK(stampacchia_gamma(two, 3.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));

  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 32));
  const LevelSetTrace t = stampacchia_bound(DiscreteFunction::constant(K.grid, 1.0), 3.0, K);
  CHECK(t.status == Status::passed);
  REQUIRE(t.zero_level);
  CHECK(*t.zero_level >= t.sup_norm);
  for (std::size_t j = 0; j < t.h_lattice.size(); ++j)
    CHECK((t.phi_values[j] == 0.0) == (t.h_lattice[j] >= t.sup_norm));
  CHECK(std::is_sorted(t.phi_values.rbegin(), t.phi_values.rend()));

  const LevelSetTrace z = stampacchia_bound(DiscreteFunction::zeros(K.grid), 3.0, K);
  CHECK(z.sup_norm == 0.0);
  for (double phi : z.phi_values) CHECK(phi == 0.0);

  CHECK_THROWS_AS(stampacchia_bound(DiscreteFunction::constant(K.grid, 1.0), 1.0, K), DomainError);
}

TEST_CASE("bootstrap exponents increase") {
  const ProblemSpec s = spec(2.0, 0.4, 0.05);
  const auto a = bootstrap_exponents(s, 0.5, 6);
  REQUIRE(a.size() == 7);
  const double r = s.critical_exponent() / s.p;
  for (std::size_t n = 1; n < a.size(); ++n) {
    CHECK(a[n] > a[n - 1]);
    CHECK(a[n] == (a[n - 1] + 1.0) * r - 1.0);
  }
}
