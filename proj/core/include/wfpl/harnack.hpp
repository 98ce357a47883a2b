#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfpl/discrete_function.hpp"
#include "wfpl/kernel.hpp"
#include "wfpl/report.hpp"

namespace wfpl {

struct HarnackReport {
  double r = 0.0;
  double q_h = 0.0;
  double lhs = 0.0;      // (mu-average over B_r of v^q_h)^{1/q_h}
  double rhs_inf = 0.0;  // min over B_{3r/2}
  double ratio = 0.0;
  std::vector<double> mesh_levels;  // ratios across refinements, filled by the suite
};

/// min_i (A(v) - load_density(f))_i, the worst supersolution residual.
double supersolution_residual(const DiscreteFunction& v, const DiscreteFunction& f, const KernelMatrix& K);

/// Requires v > 0, A(v) >= load_density(f) - 1e-7 (1 + max|load|), f >= 0,
/// 0 < q_h < N(p-1)/(N-ps) and 3r/2 <= R. Throws ContractError for a
/// non-supersolution (message carries the worst residual) and DomainError
/// otherwise.
HarnackReport weak_harnack_check(const DiscreteFunction& v, double r, double q_h, const KernelMatrix& K,
                                 const std::optional<DiscreteFunction>& f = std::nullopt);

/// For each r (8r <= R): L(r) = sum over pairs i<j in B_{6r} of
/// w_ij |log v_i - log v_j|^p and L(r) / r^{N-ps-2beta}. Violated when the
/// ratios spread by more than a factor 50.
EstimateReport log_estimate_check(const DiscreteFunction& v, const std::vector<double>& radii, const KernelMatrix& K);

/// Hypothesis mu(B_r cap {v >= k}) >= sigma mu(B_r), then for each delta the
/// ratio mu(B_{6r} cap {v <= 2 delta k}) / mu(B_{6r}) and the implied
/// constant ratio sigma log(1/(2 delta)). Ratios must not increase as delta
/// decreases. Requires 6r <= R and 0 < delta < 1/4. The suite tracks the
/// largest implied constant over the delta lattice.
EstimateReport level_set_lemma_check(const DiscreteFunction& v, double k, double sigma,
                                     const std::vector<double>& deltas, double r);

/// delta* = min_{B_{4r}} v / k. Requires 4r <= R, k > 0, and the level-set
/// hypothesis for (k, sigma, r); otherwise hypothesis_not_met.
EstimateReport positivity_expansion_check(const DiscreteFunction& v, double k, double sigma, double r);

/// C = (avg_{B_r} v^{alpha2})^{1/alpha2} / (avg_{B_{3r/2}} v^{alpha1})^{1/alpha1}
/// for 0 < alpha1 < alpha2 < N(p-1)/(N-ps).
EstimateReport reverse_holder_check(const DiscreteFunction& v, double alpha1, double alpha2, double r);

/// LHS = sum |w_i - W|^p psi_i mu_i with W the psi mu-mean,
/// RHS = 2 sum_{i<j} w_ij |w_i - w_j|^p min(psi_i, psi_j); constant LHS/RHS.
/// psi must be nonzero, within [0, 1] and nonincreasing in |x|.
EstimateReport poincare_wirtinger_check(const DiscreteFunction& w, const DiscreteFunction& psi, const KernelMatrix& K);

/// (1 - |x|)_+ sampled at cell centers.
DiscreteFunction default_psi(const GridPtr& grid);

struct HarnackSuiteConfig {
  std::vector<std::size_t> mesh_levels = {32, 64, 128};
  double harnack_radius = 0.25;
  double q_fraction = 0.5;  // q_h as a fraction of N(p-1)/(N-ps)
  std::vector<double> log_radii = {1.0 / 16.0, 1.0 / 8.0};
  double level_radius = 1.0 / 6.0;
  double sigma = 0.5;
  std::vector<double> deltas = {0.2, 0.1, 0.05};
  double expansion_radius = 0.125;
  double alpha1_fraction = 0.2;
  double alpha2_fraction = 0.8;
  double holder_radius = 0.25;
  double stability_factor = 2.0;
  double scale_tolerance = 1e-10;
};

struct HarnackSuiteResult {
  HarnackReport harnack;  // finest level, mesh_levels holds every level's ratio
  std::vector<EstimateReport> finest;  // per-check reports at the finest mesh
  std::map<std::string, std::vector<double>> constants;  // name -> one value per mesh level
  std::map<std::string, double> scale_defects;  // name -> max relative change under v -> 2v
  std::map<std::string, double> closure;         // min(v1, v2) supersolution residuals
  EstimateReport summary;
};

/// Runs every check on v = solve(spike) at each mesh level, tracks each
/// constant across levels (finite, max/min within stability_factor) and
/// repeats with 2v for the scale test.
HarnackSuiteResult run_harnack_suite(const ProblemSpec& spec, const HarnackSuiteConfig& cfg = {});

}  // namespace wfpl
