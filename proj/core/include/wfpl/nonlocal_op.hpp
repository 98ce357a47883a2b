#pragma once

#include <cstdint>
#include <vector>

#include "wfpl/discrete_function.hpp"
#include "wfpl/kernel.hpp"
#include "wfpl/report.hpp"

namespace wfpl {

/// phi_p(t) = |t|^{p-2} t, with phi_p(0) = 0 for every p > 1.
double signed_power(double t, double p);

/// E(u) = sum_{i<j} w_ij |u_i - u_j|^p + sum_i t_i |u_i|^p.
/// Each unordered pair is counted once, so E equals one half of the double
/// integral of |u(x)-u(y)|^p d nu over D_Omega.
double energy_seminorm(const DiscreteFunction& u, const KernelMatrix& K, double p);

/// Euclidean gradient of E/p: g_i = sum_j w_ij phi_p(u_i - u_j) + t_i phi_p(u_i).
std::vector<double> energy_gradient(const DiscreteFunction& u, const KernelMatrix& K, double p);

/// A(u)_i = g_i / mu_i, so that <A(u), v>_mu = (1/p) dE(u)[v].
DiscreteFunction apply_operator(const DiscreteFunction& u, const KernelMatrix& K, double p);

/// <a, b>_mu = sum a_i b_i mu_i
double pairing_mu(const DiscreteFunction& a, const DiscreteFunction& b);
/// <a, b>_dx = sum a_i b_i dx_i
double pairing_dx(const DiscreteFunction& a, const DiscreteFunction& b);
/// sqrt(<a, a>_mu)
double norm_mu(const DiscreteFunction& a);

/// mu-density of a dx-load: f_i dx_i / mu_i. The weak form
/// <A(u), phi>_mu = <f, phi>_dx reads A(u) = load_density(f).
DiscreteFunction load_density(const DiscreteFunction& f);

struct TruncationLevel {
  double k;
  explicit TruncationLevel(double level);
};

double truncate(double a, double k);
DiscreteFunction truncate(const DiscreteFunction& u, TruncationLevel k);
/// G_k(u) = u - T_k(u)
DiscreteFunction remainder(const DiscreteFunction& u, TruncationLevel k);

/// mu{|u| > k}
double distribution_function(const DiscreteFunction& u, double k);

/// 2 E(u) / (sum |u_i|^{p*} |x_i|^{-2 beta p*/p} dx_i)^{p/p*}
double sobolev_quotient(const DiscreteFunction& u, const KernelMatrix& K);

/// Samples random (a, b, k) and measures the constants of the pointwise
/// inequalities used with truncated and power test functions:
///   (a+b)^alpha <= c1 a^alpha + c2 b^alpha                                (c1 = c2 reported)
///   |a-b|^{p-2}(a-b)(a^alpha - b^alpha) >= c |a^{(p+alpha-1)/p} - b^{(p+alpha-1)/p}|^p
///   |a+b|^{alpha-1}|a-b|^p <= c |a^{(p+alpha-1)/p} - b^{(p+alpha-1)/p}|^p     (alpha >= 1)
/// and the two truncation inequalities with constant one, which throw
/// InequalityViolation carrying {a, b, k, p} on failure.
EstimateReport check_algebraic_inequalities(double p, double alpha, int samples, std::uint64_t seed = 20240611);

/// Discrete Picone: E(v) >= <A(w), |v|^p / w^{p-1}>_mu for w > 0 with A(w) >= 0.
/// Throws ContractError when w violates the hypothesis.
EstimateReport picone_check(const DiscreteFunction& w, const DiscreteFunction& v, const KernelMatrix& K, double p);

}  // namespace wfpl
