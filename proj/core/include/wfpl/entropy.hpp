#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "wfpl/discrete_function.hpp"
#include "wfpl/kernel.hpp"
#include "wfpl/quadrature.hpp"
#include "wfpl/report.hpp"
#include "wfpl/solver.hpp"

namespace wfpl {

struct EstimateConfig {
  /// Truncation levels k; empty selects a geometric lattice scaled to the solutions.
  std::vector<double> k_lattice;
  /// Entropy-tail levels h; empty selects an equispaced lattice up to 1.25 max|u|.
  std::vector<double> h_lattice;
  double alpha = 1.0;
  std::vector<std::pair<double, double>> q_s1_pairs;

  /// Requires alpha > 0, q < N(p-1)/(N-s), 0 < s1 < s and q s1 + 2 beta < N.
  void validate(const ProblemSpec& spec) const;
};

struct BesovSeries {
  double q = 0.0;
  double s1 = 0.0;
  std::vector<double> values;  // one per level
};

struct SchemeTrace {
  std::vector<double> levels;
  std::vector<DiscreteFunction> solutions;
  std::vector<double> data_l1;       // ||T_n(f)||_{L^1(dx)}
  std::vector<int> solver_iterations;
  std::vector<double> k_lattice;
  std::vector<std::vector<double>> truncation_energies;  // [level][k]
  std::vector<double> distribution;                     // Phi of the last level over k_lattice
  LineFit marcinkiewicz_fit;
  std::size_t fit_points = 0;
  std::vector<BesovSeries> besov;
  std::vector<double> h_lattice;
  std::vector<std::vector<double>> entropy_tails;  // [level][h]
  bool nonnegative_data = false;
  double monotonicity_defect = 0.0;  // max_i (u_n - u_{n+1})_i over consecutive levels
};

/// Unit-mass style spike: mass / (2 dx) on the two cells adjacent to the origin.
DiscreteFunction spike_data(const GridPtr& grid, double mass = 1.0);

/// Solves A(u_n) = T_n(f) for each level (warm start from the previous level)
/// and evaluates every estimate series. Solver failures are rethrown with the
/// offending level in the message.
SchemeTrace run_scheme(const DiscreteFunction& f, const std::vector<double>& levels, const KernelMatrix& K,
                       const EstimateConfig& cfg = {});

/// E(T_k u_n) <= 2 k ||T_n f||_1 + 1e-8 for every (n, k).
EstimateReport truncation_energy_bound(const SchemeTrace& trace);

/// Least-squares slope of log Phi vs log k over the decaying window of the
/// last level, checked against -p1 + 0.5.
EstimateReport marcinkiewicz_estimate(const SchemeTrace& trace, const ProblemSpec& spec);

/// Fit window used by marcinkiewicz_estimate: the first decade of Phi (level
/// sets still a macroscopic part of Omega, boundary dominated) and the last
/// decade before Phi hits zero (quantized by single cells) are dropped.
LineFit fit_distribution_decay(const std::vector<double>& k, const std::vector<double>& phi, std::size_t* used);

/// Uniform boundedness of the Besov-type seminorms: max over levels within
/// 10x of the median.
EstimateReport besov_estimate(const SchemeTrace& trace, const EstimateConfig& cfg, const ProblemSpec& spec);

/// 2 sum_{i<j} w_ij |u_i - u_j|^q with w assembled at order q s1 (no tail).
double besov_seminorm(const DiscreteFunction& u, const KernelMatrix& besov_kernel, double q);

/// For each h: sum over the discrete R_h of w_ij |u_i - u_j|^{p-1}, exterior
/// pairs entering through t_i |u_i|^{p-1} when |u_i| >= h + 1.
std::vector<double> entropy_tail(const DiscreteFunction& u, const KernelMatrix& K, const std::vector<double>& h_lattice);

/// Checks that each tail series vanishes for h > max|u| and is nonincreasing
/// for h >= max|u| / 2. Also checks the level-strip bound
///   sum_{i<j, u_i,u_j in [h-k-1, h-1]} w_ij |u_i-u_j|^p <= 2k sum_{u_i > h-k-1} |f_i| dx_i.
EstimateReport entropy_tail_check(const SchemeTrace& trace, const DiscreteFunction& f, const KernelMatrix& K);

/// With u_last as proxy limit, E(T_k u_n - T_k u_last) must decrease along the
/// levels (5% slack) and end below 10% of its first value, for every k.
EstimateReport strong_Tk_convergence(const SchemeTrace& trace, const std::vector<double>& k_lattice,
                                     const KernelMatrix& K);

/// LHS = sum_{i<j} w_ij phi_p(u_i-u_j)(T_k(u-phi)_i - T_k(u-phi)_j) + sum_i t_i phi_p(u_i) T_k(u-phi)_i,
/// RHS = sum_i f_i T_k(u-phi)_i dx_i; requires LHS <= RHS + 1e-7 scale.
EstimateReport entropy_inequality_check(const DiscreteFunction& u, const DiscreteFunction& phi, double k,
                                        const KernelMatrix& K, const DiscreteFunction& f);

}  // namespace wfpl
