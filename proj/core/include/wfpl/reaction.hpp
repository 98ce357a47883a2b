#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfpl/discrete_function.hpp"
#include "wfpl/kernel.hpp"
#include "wfpl/report.hpp"

namespace wfpl {

enum class ReactionStatus { converged, diverged, condition_violated };
std::string_view to_string(ReactionStatus s);

struct ReactionOptions {
  int max_iterations = 500;
  /// Fixed-point tolerance on ||u_{i+1} - u_i||_inf; <= 0 selects 1e-9 (1 + ||u||_inf).
  double tol = 0.0;
  /// Starting iterate (zero when empty). Monotonicity is only asserted from zero.
  std::optional<DiscreteFunction> initial;
};

struct ReactionOutcome {
  ReactionStatus status = ReactionStatus::converged;
  std::vector<double> iterate_norms;  // ||u_i||_inf, i = 0, 1, ...
  std::optional<DiscreteFunction> solution;
  std::optional<double> lambda_bar;
  std::optional<double> lambda1;
  double residual = 0.0;  // last ||u_{i+1} - u_i||_inf
  double tolerance = 0.0;
  int iterations = 0;
  std::string message;
};

/// u_0 = 0 (or options.initial), u_{i+1} = solve(lambda u_i^q + g) with
/// g a nonnegative dx-density. Diverged once ||u_i||_inf exceeds
/// 1e6 (1 + ||g||_1), after three consecutive norm ratios above 1.05 at the
/// iteration cap, or when the cap is hit with growing norms.
/// Throws DomainError for signed g, lambda < 0 or q <= 0 and
/// ConsistencyError when an iterate started from zero drops below its
/// predecessor by more than 1e-8.
ReactionOutcome monotone_iterate(const DiscreteFunction& g, double lambda, double q, const KernelMatrix& K,
                                 const ReactionOptions& options = {});

/// Restarts the iteration from u + c (1 + ||u||_inf) for each c and checks
/// that every fixed point found dominates u (1e-7). Restarts that diverge are
/// counted but do not fail the check.
EstimateReport minimality_check(const DiscreteFunction& u, const DiscreteFunction& g, double lambda, double q,
                                const KernelMatrix& K, const std::vector<double>& offsets = {0.01, 0.05, 0.2});

enum class Regime {
  sublinear,
  eigenvalue_subcritical,
  eigenvalue_supercritical,
  superlinear_ok,
  superlinear_condition_failed
};
std::string_view to_string(Regime r);

struct RegimeReport {
  Regime regime = Regime::sublinear;
  std::optional<double> lambda_bar;
  std::optional<std::size_t> witness_cell;  // first cell with w^q > g
  double worst_excess = 0.0;                // max (w^q - g)
  std::string message;
};

/// w must solve A(w) = g. q = p-1 compares lambda with lambda1; q > p-1
/// checks w^q <= g cell by cell and lambda <= 2^{q/(1-p)}.
RegimeReport regime_classify(double lambda, double q, const ProblemSpec& spec, double lambda1,
                             const DiscreteFunction& g, const DiscreteFunction& w);

/// Solves A(w) = g and A(v) = g + w^q, then asserts
///   v <= 2^{p-1} w + 1e-7   and   A(v) >= load_density(g + lambda_bar v^q) - 1e-7.
/// Also records the homogeneity bound 2^{1/(p-1)} w.
EstimateReport supersolution_check(const DiscreteFunction& g, double q, const KernelMatrix& K);

/// Constant data eps 1 with eps = safety times the largest admissible
/// constant: (S(eps) )^q <= eps with S the solution map. Requires q > p-1.
DiscreteFunction admissible_constant_data(const KernelMatrix& K, double q, double safety = 0.5);

struct LevelSetTrace {
  std::vector<double> h_lattice;
  std::vector<double> phi_values;  // omega{|u| > h}, d omega = dx / |x|^{p* beta}
  double gamma = 0.0;              // (p*/(p-1)) (1 - 1/m - 1/p*)
  double fitted_exponent = 0.0;    // slope of log Phi(h_{j+1}) against log Phi(h_j)
  double sup_norm = 0.0;
  double data_norm = 0.0;          // ||f |x|^{p* beta}||_{L^m(d omega)}
  std::optional<double> zero_level;  // first lattice h with Phi(h) = 0
  Status status = Status::passed;
  std::string message;
};

/// Solves A(u) = f and measures the level sets of u in d omega.
/// Throws DomainError when m <= N/(ps) or p* beta >= N.
LevelSetTrace stampacchia_bound(const DiscreteFunction& f, double m, const KernelMatrix& K,
                                std::vector<double> h_lattice = {});

/// a_{n+1} = (a_n + p - 1) p*/p - (p - 1), n = 0..steps-1. Throws
/// ConsistencyError unless the sequence increases strictly.
std::vector<double> bootstrap_exponents(const ProblemSpec& spec, double a0, int steps);

}  // namespace wfpl
