#include "wfpl/nonlocal_op.hpp"

#include <cmath>

#include "wfpl/error.hpp"
#include "wfpl/parallel.hpp"
#include "wfpl/quadrature.hpp"

namespace wfpl {
namespace {

void check_inputs(const DiscreteFunction& u, const KernelMatrix& K, double p) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  require_grid(u, K.grid);
}

}  // namespace

double signed_power(double t, double p) {
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

double energy_seminorm(const DiscreteFunction& u, const KernelMatrix& K, double p) {
  check_inputs(u, K, p);
  const std::size_t n = u.size();
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const double* w = K.row(i);
    CompensatedSum s;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = u[i] - u[j];
      if (d != 0.0) s.add(w[j] * std::pow(std::abs(d), p));
    }
    if (u[i] != 0.0) s.add(K.tail_weights[i] * std::pow(std::abs(u[i]), p));
    rows[i] = s.value();
  });
  return compensated_sum(rows);
}

std::vector<double> energy_gradient(const DiscreteFunction& u, const KernelMatrix& K, double p) {
  check_inputs(u, K, p);
  const std::size_t n = u.size();
  std::vector<double> g(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const double* w = K.row(i);
    CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s.add(w[j] * signed_power(u[i] - u[j], p));
    s.add(K.tail_weights[i] * signed_power(u[i], p));
    g[i] = s.value();
  });
  return g;
}

DiscreteFunction apply_operator(const DiscreteFunction& u, const KernelMatrix& K, double p) {
  std::vector<double> g = energy_gradient(u, K, p);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] /= u.grid->cell(i).mu_measure;
  return {u.grid, std::move(g)};
}

double pairing_mu(const DiscreteFunction& a, const DiscreteFunction& b) {
  require_same_grid(a, b);
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i] * a.grid->cell(i).mu_measure);
  return s.value();
}

double pairing_dx(const DiscreteFunction& a, const DiscreteFunction& b) {
  require_same_grid(a, b);
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i] * a.grid->cell(i).dx_measure);
  return s.value();
}

double norm_mu(const DiscreteFunction& a) { return std::sqrt(pairing_mu(a, a)); }

DiscreteFunction load_density(const DiscreteFunction& f) {
  DiscreteFunction out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Cell& c = f.grid->cell(i);
    out[i] = f[i] * c.dx_measure / c.mu_measure;
  }
  return out;
}

TruncationLevel::TruncationLevel(double level) : k(level) {
  if (!(level > 0.0)) throw DomainError("truncation level must be positive");
}

double truncate(double a, double k) {
  if (std::abs(a) <= k) return a;
  return std::copysign(k, a);
}

DiscreteFunction truncate(const DiscreteFunction& u, TruncationLevel k) {
  DiscreteFunction out = u;
  for (double& x : out.values) x = truncate(x, k.k);
  return out;
}

DiscreteFunction remainder(const DiscreteFunction& u, TruncationLevel k) {
  DiscreteFunction out = u;
  for (double& x : out.values) x -= truncate(x, k.k);
  return out;
}

double distribution_function(const DiscreteFunction& u, double k) {
  if (!(k > 0.0)) throw DomainError("distribution_function: level must be positive");
  CompensatedSum s;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) > k) s.add(u.grid->cell(i).mu_measure);
  return s.value();
}

double sobolev_quotient(const DiscreteFunction& u, const KernelMatrix& K) {
  const ProblemSpec& spec = K.grid->spec();
  const double p = spec.p;
  if (u.max_abs() == 0.0) throw DomainError("sobolev_quotient: u must be nonzero");
  const double pstar = spec.critical_exponent();
  const double numerator = 2.0 * energy_seminorm(u, K, p);
  CompensatedSum d;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Cell& c = u.grid->cell(i);
    if (u[i] == 0.0) continue;
    d.add(std::pow(std::abs(u[i]), pstar) * std::pow(std::abs(c.center), -2.0 * spec.beta * pstar / p) *
          c.dx_measure);
  }
  return numerator / std::pow(d.value(), p / pstar);
}

}  // namespace wfpl
