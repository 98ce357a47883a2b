#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "wfpl/error.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/solver.hpp"

using namespace wfpl;
using test::spec;

namespace {

DiscreteFunction random_load(const GridPtr& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  DiscreteFunction f = DiscreteFunction::zeros(g);
  for (double& x : f.values) x = d(rng);
  return f;
}

SolveOptions tight(const DiscreteFunction& f) {
  SolveOptions o;
  o.tol = 1e-2 * default_tolerance(f);
  return o;
}

}  // namespace

TEST_CASE("zero load gives the zero solution") {
  for (const ProblemSpec& s : test::golden_specs()) {
    const KernelMatrix K = assemble_kernel(make_grid(s, 8));
    const SolveReport r = solve_dirichlet(DiscreteFunction::zeros(K.grid), K);
    CHECK(r.iterations == 0);
    CHECK(r.solution.max_abs() == 0.0);
  }
}

TEST_CASE("p = 2 matches a dense linear solve") {
  std::mt19937_64 rng(23);
  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), n));
    const DiscreteFunction f = random_load(K.grid, rng, -1.0, 1.0);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = f[i] * K.grid->cell(i).dx_measure;
    const Eigen::VectorXd x = test::stiffness(K).ldlt().solve(b);
    const SolveReport r = solve_dirichlet(f, K, tight(f));
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(r.solution[i] - x(static_cast<Eigen::Index>(i))));
    CHECK(err <= 1e-10 * (1.0 + x.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("report fields") {
  std::mt19937_64 rng(29);
  for (const ProblemSpec& s : test::golden_specs()) {
    const KernelMatrix K = assemble_kernel(make_grid(s, 32));
    const DiscreteFunction f = random_load(K.grid, rng, 0.0, 2.0);
    const SolveReport r = solve_dirichlet(f, K);
    CHECK(r.final_gradient_norm <= r.tolerance);
    CHECK(r.final_gradient_norm == stationarity_residual(r.solution, f, K));
    CHECK(r.tolerance == default_tolerance(f));
    for (std::size_t k = 1; k < r.energy_trace.size(); ++k) CHECK(r.energy_trace[k] <= r.energy_trace[k - 1]);
    CHECK(r.energy_value == doctest::Approx(energy_seminorm(r.solution, K, s.p) / s.p - pairing_dx(f, r.solution)));
  }
}

TEST_CASE("nonnegative loads give positive solutions") {
  std::mt19937_64 rng(31);
  for (const ProblemSpec& s : test::golden_specs()) {
    const KernelMatrix K = assemble_kernel(make_grid(s, 32));
    DiscreteFunction f = random_load(K.grid, rng, 0.0, 1.0);
    for (std::size_t i = 0; i < 16; ++i) f[i] = 0.0;
    CHECK(solve_dirichlet(f, K).solution.min() > 0.0);
  }
}

TEST_CASE("comparison") {
  std::mt19937_64 rng(37);
  for (const ProblemSpec& s : test::golden_specs()) {
    const KernelMatrix K = assemble_kernel(make_grid(s, 16));
    const DiscreteFunction f1 = random_load(K.grid, rng, 0.0, 1.0);
    DiscreteFunction f2 = f1;
    for (double& x : f2.values) x *= 2.0;
    CHECK(comparison_check(f1, f2, K).passed());
    CHECK(comparison_check(f1, f1, K).passed());
    CHECK(comparison_check(DiscreteFunction::zeros(K.grid), f2, K).passed());
  }
}

TEST_CASE("uniqueness from random starts") {
  std::mt19937_64 rng(41);
  for (double p : {3.0, 1.5}) {
    const KernelMatrix K = assemble_kernel(make_grid(spec(p, 0.25, 0.05), 16));
    const DiscreteFunction f = random_load(K.grid, rng, -1.0, 1.0);
    const EstimateReport r = uniqueness_check(f, K, 5);
    CHECK(r.passed());
    CHECK(uniqueness_check(DiscreteFunction::zeros(K.grid), K, 3).passed());
  }
}

TEST_CASE("invalid options") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.0), 8));
  SolveOptions o;
  o.tol = -1.0;
  CHECK_NOTHROW(solve_dirichlet(DiscreteFunction::constant(K.grid, 1.0), K, o));
  o.tol = 1e-300;
  o.max_iterations = 1;
  CHECK_THROWS_AS(solve_dirichlet(DiscreteFunction::constant(K.grid, 1.0), K, o), ConvergenceError);
}

TEST_CASE("decoupled cells: lambda1 = t / m") {
  const KernelMatrix K = test::two_cell_kernel(0.0, 3.0, 3.0);
  CHECK(first_eigenvalue(K).lambda1 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("first eigenvalue at p = 2 matches the generalized eigenproblem") {
  const KernelMatrix K = assemble_kernel(make_grid(spec(2.0, 0.4, 0.05), 32));
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(32, 32);
  for (std::size_t i = 0; i < 32; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = K.grid->cell(i).dx_measure;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(test::stiffness(K), M);
  const double ref = es.eigenvalues()(0);
  const EigenReport e = first_eigenvalue(K);
  CHECK(test::rel_err(e.lambda1, ref) < 1e-6);
  CHECK(e.eigenfunction.min() >= 0.0);
}

TEST_CASE("eigenfunction normalization, homogeneity and consistency") {
  for (const ProblemSpec& s : test::golden_specs()) {
    const KernelMatrix K = assemble_kernel(make_grid(s, 32));
    const EigenReport e = first_eigenvalue(K);
    double norm = 0.0;
    for (std::size_t i = 0; i < 32; ++i) norm += std::pow(std::abs(e.eigenfunction[i]), s.p) * K.grid->cell(i).dx_measure;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    DiscreteFunction c = e.eigenfunction;
    for (double& x : c.values) x *= -2.5;
    CHECK(test::rel_err(rayleigh_quotient(c, K), rayleigh_quotient(e.eigenfunction, K)) < 1e-10);
    CHECK(test::rel_err(rayleigh_quotient(e.eigenfunction, K), e.lambda1) < 1e-10);
    for (std::size_t k = 1; k < e.rayleigh_trace.size(); ++k)
      CHECK(e.rayleigh_trace[k] <= e.rayleigh_trace[k - 1] * (1.0 + 1e-12));

    DiscreteFunction f = e.eigenfunction;
    for (double& x : f.values) x = e.lambda1 * signed_power(x, s.p);
    const SolveReport r = solve_dirichlet(f, K, tight(f));
    double dev = 0.0;
    for (std::size_t i = 0; i < 32; ++i) dev = std::max(dev, std::abs(r.solution[i] - e.eigenfunction[i]));
    CHECK(dev <= 1e-5 * e.eigenfunction.max());
  }
}
