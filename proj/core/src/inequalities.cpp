#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wfpl/error.hpp"
#include "wfpl/nonlocal_op.hpp"

namespace wfpl {
namespace {

constexpr double kRoundoff = 1e-12;

double draw_magnitude(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  return std::exp(e(rng));
}

void check_unit_constant(const char* name, double lhs, double rhs, double a, double b, double k, double p) {
  if (lhs < rhs - kRoundoff * (1.0 + std::abs(lhs) + std::abs(rhs)))
    throw InequalityViolation(std::string(name) + " fails with constant one (lhs " + std::to_string(lhs) +
                                  ", rhs " + std::to_string(rhs) + ")",
                              {a, b, k, p});
}

}  // namespace

EstimateReport check_algebraic_inequalities(double p, double alpha, int samples, std::uint64_t seed) {
  if (!(p >= 1.0)) throw DomainError("check_algebraic_inequalities: p must be at least 1");
  if (!(alpha > 0.0)) throw DomainError("check_algebraic_inequalities: alpha must be positive");
  if (samples < 1) throw DomainError("check_algebraic_inequalities: samples must be positive");

  EstimateReport r;
  r.name = "algebraic_inequalities";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double e = (p + alpha - 1.0) / p;
  double c_sum = 0.0;
  double c_power = std::numeric_limits<double>::infinity();
  double c_alpha = 0.0;
  double min_slack_t = std::numeric_limits<double>::infinity();
  double min_slack_g = std::numeric_limits<double>::infinity();

  for (int n = 0; n < samples; ++n) {
    double a = draw_magnitude(rng);
    double b = draw_magnitude(rng);
    if (n % 17 == 0) b = a;
    const double k = draw_magnitude(rng);

    // Power inequalities on the positive half-line.
    c_sum = std::max(c_sum, std::pow(a + b, alpha) / (std::pow(a, alpha) + std::pow(b, alpha)));
    const double right = std::pow(std::abs(std::pow(a, e) - std::pow(b, e)), p);
    if (a != b && right > 0.0) {
      const double left = signed_power(a - b, p) * (std::pow(a, alpha) - std::pow(b, alpha));
      c_power = std::min(c_power, left / right);
      if (alpha >= 1.0)
        c_alpha = std::max(c_alpha, std::pow(a + b, alpha - 1.0) * std::pow(std::abs(a - b), p) / right);
    }

    // Truncations on the whole line.
    const double sa = unit(rng) < 0.5 ? -a : a;
    const double sb = unit(rng) < 0.5 ? -b : b;
    const double dt = truncate(sa, k) - truncate(sb, k);
    const double dg = (sa - truncate(sa, k)) - (sb - truncate(sb, k));
    const double lt = signed_power(sa - sb, p) * dt;
    const double rt = std::pow(std::abs(dt), p);
    const double lg = signed_power(sa - sb, p) * dg;
    const double rg = std::pow(std::abs(dg), p);
    check_unit_constant("truncation inequality for T_k", lt, rt, sa, sb, k, p);
    check_unit_constant("truncation inequality for G_k", lg, rg, sa, sb, k, p);
    min_slack_t = std::min(min_slack_t, lt - rt);
    min_slack_g = std::min(min_slack_g, lg - rg);
  }

  r.values["p"] = p;
  r.values["alpha"] = alpha;
  r.values["samples"] = samples;
  r.values["c_sum_power"] = c_sum;
  r.values["c_sum_power_theory"] = std::max(1.0, std::pow(2.0, alpha - 1.0));
  r.values["c_monotone_power"] = c_power;
  if (alpha >= 1.0) r.values["c_weighted_power"] = c_alpha;
  r.values["min_slack_truncation"] = min_slack_t;
  r.values["min_slack_remainder"] = min_slack_g;
  if (!(c_power > 0.0)) r.violate("monotone power inequality has no positive constant");
  return r;
}

EstimateReport picone_check(const DiscreteFunction& w, const DiscreteFunction& v, const KernelMatrix& K, double p) {
  require_same_grid(w, v);
  require_grid(w, K.grid);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0)) throw ContractError("picone_check: w must be strictly positive (cell " + std::to_string(i) + ")");
  const DiscreteFunction Aw = apply_operator(w, K, p);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (Aw[i] < -1e-10)
      throw ContractError("picone_check: A(w) is negative at cell " + std::to_string(i) + " (" +
                          std::to_string(Aw[i]) + ")");

  DiscreteFunction test = v;
  for (std::size_t i = 0; i < v.size(); ++i)
    test[i] = std::pow(std::abs(v[i]), p) / std::pow(std::max(w[i], 1e-300), p - 1.0);
  const double lhs = energy_seminorm(v, K, p);
  const double rhs = pairing_mu(Aw, test);
  const double tol = 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));

  EstimateReport r;
  r.name = "picone";
  r.values["lhs"] = lhs;
  r.values["rhs"] = rhs;
  r.values["gap"] = lhs - rhs;
  r.values["tolerance"] = tol;
  if (lhs < rhs - tol) r.violate("Picone inequality violated: lhs " + std::to_string(lhs) + " < rhs " + std::to_string(rhs));
  return r;
}

}  // namespace wfpl
