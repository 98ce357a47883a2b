#pragma once

#include <cstdint>
#include <string>

namespace wfpl {

/// Analytic parameters of the weighted fractional p-Laplacian problem
///   (-Delta)^s_{p,beta} u = f(x,u) in Omega = B_R(0),  u = 0 outside.
///
/// The kernel is |x-y|^{-N-ps} |x|^{-beta} |y|^{-beta}. `lambda` and
/// `q_exponent` parametrize the reaction term lambda u^q + g.
struct ProblemSpec {
  int dim = 1;
  double s = 0.4;
  double p = 2.0;
  double beta = 0.0;
  double lambda = 0.0;
  double q_exponent = 1.0;
  double domain_radius = 1.0;
  double exterior_radius = 4.0;

  /// Throws ValidationError naming the first violated standing assumption.
  void validate() const;

  double ps() const { return p * s; }
  /// p*_s = pN / (N - ps).
  double critical_exponent() const;
  /// p_1 = (p-1) N / (N - ps), the Marcinkiewicz exponent of L^1-data solutions.
  double marcinkiewicz_exponent() const;
  /// N (p-1) / (N - s): upper bound on admissible q in the Besov-type estimate.
  double besov_q_limit() const;
  /// N (p-1) / (N - ps): upper bound on the weak-Harnack integrability exponent.
  double harnack_q_limit() const;
  /// N - ps - 2 beta: scaling exponent of the logarithmic energy estimate.
  double log_estimate_exponent() const;

  /// Stable 64-bit hash of every field, used to key kernel caches.
  std::uint64_t hash() const;
  std::string describe() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// lambda_bar = 2^{q/(1-p)}: reaction strength below which the superlinear
/// iteration is dominated by the supersolution built from w^q <= g.
double superlinear_lambda_bar(double q, double p);

/// Recursion exponent (p*_s/(p-1)) (1 - 1/m - 1/p*_s) of the level-set
/// (Stampacchia) iteration for data in L^m.
double stampacchia_gamma(const ProblemSpec& spec, double m);

/// Exponent theta = ps (q - q1)/(p - q), q1 = q s1 / s, of the Besov-type kernel.
double besov_theta(const ProblemSpec& spec, double q, double s1);

}  // namespace wfpl
