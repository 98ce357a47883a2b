#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wfpl/discrete_function.hpp"
#include "wfpl/kernel.hpp"
#include "wfpl/report.hpp"

namespace wfpl {

struct SolveOptions {
  /// Stationarity tolerance; <= 0 selects 1e-9 (1 + ||f||_1).
  double tol = 0.0;
  int max_iterations = 10000;
  /// Starting iterate; zero when empty.
  std::optional<DiscreteFunction> initial;
};

struct SolveReport {
  DiscreteFunction solution;
  int iterations = 0;
  /// ||A(u) - load_density(f)||_mu at the returned iterate.
  double final_gradient_norm = 0.0;
  double tolerance = 0.0;
  /// J(u) = E(u)/p - <f, u>_dx
  double energy_value = 0.0;
  int line_search_backtracks = 0;
  std::vector<double> energy_trace;
};

/// Minimizes J(u) = E(u)/p - <f, u>_dx (f a dx-density) with damped Newton:
/// exact gradient, curvature (p-1) max(|t|, eps)^{p-2} per difference, a
/// Levenberg-Marquardt shift for p > 2 and Armijo backtracking on J.
/// Throws DomainError for p <= 1 or tol <= 0 and ConvergenceError (with the
/// energy trace) when the iteration budget runs out.
SolveReport solve_dirichlet(const DiscreteFunction& f, const KernelMatrix& K, const SolveOptions& options = {});

double default_tolerance(const DiscreteFunction& f);

/// ||A(u) - load_density(f)||_mu
double stationarity_residual(const DiscreteFunction& u, const DiscreteFunction& f, const KernelMatrix& K);

/// Solves with 0 <= f1 <= f2 and checks u1 <= u2 + 1e-8.
EstimateReport comparison_check(const DiscreteFunction& f1, const DiscreteFunction& f2, const KernelMatrix& K);

/// Solves from n_starts random iterates and checks the sup-spread <= 1e-7.
EstimateReport uniqueness_check(const DiscreteFunction& f, const KernelMatrix& K, int n_starts,
                                std::uint64_t seed = 20240611);

struct EigenReport {
  double lambda1 = 0.0;
  DiscreteFunction eigenfunction;  // nonnegative, sum |phi|^p dx = 1
  double residual = 0.0;           // ||A(phi) - lambda1 load_density(|phi|^{p-2} phi)||_mu
  int iterations = 0;
  std::vector<double> rayleigh_trace;
};

/// R(u) = E(u) / sum |u_i|^p dx_i
double rayleigh_quotient(const DiscreteFunction& u, const KernelMatrix& K);

/// Smallest value of R by nonlinear inverse power iteration from the positive
/// constant: u <- solve(|u|^{p-2} u), normalized. R decreases along the
/// iteration; a rise beyond roundoff throws ConvergenceError.
EigenReport first_eigenvalue(const KernelMatrix& K, double tol = 1e-10);

}  // namespace wfpl
