#include "wfpl/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfpl/error.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/quadrature.hpp"
#include "wfpl/solver.hpp"

namespace wfpl {
namespace {

DiscreteFunction reaction_load(const DiscreteFunction& u, const DiscreteFunction& g, double lambda, double q) {
  DiscreteFunction b = g;
  if (lambda == 0.0) return b;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += lambda * std::pow(std::max(u[i], 0.0), q);
  return b;
}

DiscreteFunction solve_tight(const DiscreteFunction& f, const KernelMatrix& K,
                             const std::optional<DiscreteFunction>& start = std::nullopt) {
  SolveOptions opt;
  opt.tol = 1e-2 * default_tolerance(f);
  opt.initial = start;
  return solve_dirichlet(f, K, opt).solution;
}

double sup_distance(const DiscreteFunction& a, const DiscreteFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

std::string_view to_string(ReactionStatus s) {
  switch (s) {
    case ReactionStatus::converged: return "converged";
    case ReactionStatus::diverged: return "diverged";
    case ReactionStatus::condition_violated: return "condition_violated";
  }
  return "unknown";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::sublinear: return "sublinear";
    case Regime::eigenvalue_subcritical: return "eigenvalue_subcritical";
    case Regime::eigenvalue_supercritical: return "eigenvalue_supercritical";
    case Regime::superlinear_ok: return "superlinear_ok";
    case Regime::superlinear_condition_failed: return "superlinear_condition_failed";
  }
  return "unknown";
}

ReactionOutcome monotone_iterate(const DiscreteFunction& g, double lambda, double q, const KernelMatrix& K,
                                 const ReactionOptions& options) {
  require_grid(g, K.grid);
  if (!(lambda >= 0.0)) throw DomainError("monotone_iterate: lambda must be nonnegative");
  if (!(q > 0.0)) throw DomainError("monotone_iterate: q must be positive");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] < 0.0) throw DomainError("monotone_iterate: g must be nonnegative (cell " + std::to_string(i) + ")");
  if (options.max_iterations < 1) throw DomainError("monotone_iterate: max_iterations must be positive");

  const double p = K.grid->spec().p;
  const bool from_zero = !options.initial;
  const double blowup = 1e6 * (1.0 + g.l1_dx());

  ReactionOutcome out;
  if (q > p - 1.0) out.lambda_bar = superlinear_lambda_bar(q, p);

  DiscreteFunction u = from_zero ? DiscreteFunction::zeros(K.grid) : *options.initial;
  require_grid(u, K.grid);
  out.iterate_norms.push_back(u.max_abs());
  int growing = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    DiscreteFunction next = solve_tight(reaction_load(u, g, lambda, q), K, u);
    if (from_zero) {
      for (std::size_t i = 0; i < u.size(); ++i)
        if (next[i] < u[i] - 1e-8)
          throw ConsistencyError("monotone_iterate: iterate " + std::to_string(it) + " drops below its predecessor at cell " +
                                 std::to_string(i));
    }
    const double step = sup_distance(next, u);
    const double prev_norm = out.iterate_norms.back();
    const double norm = next.max_abs();
    out.iterate_norms.push_back(norm);
    out.iterations = it;
    out.residual = step;
    out.tolerance = options.tol > 0.0 ? options.tol : 1e-9 * (1.0 + norm);
    growing = (prev_norm > 0.0 && norm > 1.05 * prev_norm) ? growing + 1 : 0;
    u = std::move(next);
    if (!std::isfinite(norm) || norm > blowup) {
      out.status = ReactionStatus::diverged;
      out.message = "sup norm exceeded " + std::to_string(blowup) + " at iterate " + std::to_string(it);
      return out;
    }
    if (step <= out.tolerance) {
      out.status = ReactionStatus::converged;
      out.solution = std::move(u);
      return out;
    }
  }
  const auto& n = out.iterate_norms;
  const bool nondecreasing = std::is_sorted(n.begin(), n.end());
  if (growing >= 3 || (nondecreasing && n.back() > n.front())) {
    out.status = ReactionStatus::diverged;
    out.message = "iteration cap reached with growing norms";
    return out;
  }
  throw ConvergenceError("monotone_iterate: no fixed point within the iteration cap", out.iterate_norms);
}

EstimateReport minimality_check(const DiscreteFunction& u, const DiscreteFunction& g, double lambda, double q,
                                const KernelMatrix& K, const std::vector<double>& offsets) {
  require_same_grid(u, g);
  EstimateReport r;
  r.name = "minimality";
  const double scale = 1.0 + u.max_abs();
  int found = 0, escaped = 0;
  double worst = 0.0;
  for (double c : offsets) {
    ReactionOptions opt;
    opt.initial = u;
    for (double& x : opt.initial->values) x += c * scale;
    ReactionOutcome o;
    try {
      o = monotone_iterate(g, lambda, q, K, opt);
    } catch (const ConvergenceError&) {
      ++escaped;
      continue;
    }
    if (o.status != ReactionStatus::converged) {
      ++escaped;
      continue;
    }
    ++found;
    for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, u[i] - (*o.solution)[i]);
  }
  r.values["restarts"] = static_cast<double>(offsets.size());
  r.values["fixed_points_found"] = found;
  r.values["restarts_escaped"] = escaped;
  r.values["max_excess_over_found"] = worst;
  if (worst > 1e-7) r.violate("a restart found a fixed point below the returned solution");
  return r;
}

RegimeReport regime_classify(double lambda, double q, const ProblemSpec& spec, double lambda1,
                             const DiscreteFunction& g, const DiscreteFunction& w) {
  require_same_grid(g, w);
  RegimeReport r;
  const double p = spec.p;
  if (q < p - 1.0) {
    r.regime = Regime::sublinear;
    r.message = "q < p-1: positive solution for every lambda > 0";
    return r;
  }
  if (q == p - 1.0) {
    r.regime = lambda < lambda1 ? Regime::eigenvalue_subcritical : Regime::eigenvalue_supercritical;
    r.message = lambda < lambda1 ? "lambda below lambda1" : "lambda at or above lambda1";
    return r;
  }
  r.lambda_bar = superlinear_lambda_bar(q, p);
  r.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double excess = std::pow(std::max(w[i], 0.0), q) - g[i];
    if (excess > r.worst_excess) r.worst_excess = excess;
    if (excess > 0.0 && !r.witness_cell) r.witness_cell = i;
  }
  if (r.witness_cell) {
    r.regime = Regime::superlinear_condition_failed;
    r.message = "w^q > g at cell " + std::to_string(*r.witness_cell);
  } else if (lambda > *r.lambda_bar) {
    r.regime = Regime::superlinear_condition_failed;
    r.message = "lambda exceeds lambda_bar = " + std::to_string(*r.lambda_bar);
  } else {
    r.regime = Regime::superlinear_ok;
    r.message = "w^q <= g and lambda <= lambda_bar";
  }
  return r;
}

EstimateReport supersolution_check(const DiscreteFunction& g, double q, const KernelMatrix& K) {
  require_grid(g, K.grid);
  const double p = K.grid->spec().p;
  if (!(q > p - 1.0)) throw DomainError("supersolution_check: needs q > p-1");
  EstimateReport r;
  r.name = "supersolution";
  const DiscreteFunction w = solve_tight(g, K);
  DiscreteFunction load = g;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double wq = std::pow(std::max(w[i], 0.0), q);
    if (wq > g[i] + 1e-12 * (1.0 + g[i]))
      throw ContractError("supersolution_check: w^q > g at cell " + std::to_string(i));
    load[i] += wq;
  }
  const DiscreteFunction v = solve_tight(load, K);
  const double lambda_bar = superlinear_lambda_bar(q, p);
  const double factor = std::pow(2.0, p - 1.0);
  const double homogeneity = std::pow(2.0, 1.0 / (p - 1.0));
  double over_factor = -std::numeric_limits<double>::infinity();
  double over_homogeneity = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    over_factor = std::max(over_factor, v[i] - factor * w[i]);
    over_homogeneity = std::max(over_homogeneity, v[i] - homogeneity * w[i]);
  }
  DiscreteFunction target = g;
  for (std::size_t i = 0; i < g.size(); ++i) target[i] += lambda_bar * std::pow(std::max(v[i], 0.0), q);
  const DiscreteFunction Av = apply_operator(v, K, p);
  const DiscreteFunction rhs = load_density(target);
  double deficit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) deficit = std::max(deficit, rhs[i] - Av[i]);

  r.values["lambda_bar"] = lambda_bar;
  r.values["bound_factor"] = factor;
  r.values["homogeneity_factor"] = homogeneity;
  r.values["max_v_minus_factor_w"] = over_factor;
  r.values["max_v_minus_homogeneity_w"] = over_homogeneity;
  r.values["max_supersolution_deficit"] = deficit;
  r.values["w_sup"] = w.max_abs();
  r.values["v_sup"] = v.max_abs();
  if (over_factor > 1e-7) r.violate("v exceeds 2^{p-1} w by " + std::to_string(over_factor));
  if (deficit > 1e-7) r.violate("A(v) falls below g + lambda_bar v^q by " + std::to_string(deficit));
  return r;
}

DiscreteFunction admissible_constant_data(const KernelMatrix& K, double q, double safety) {
  const double p = K.grid->spec().p;
  if (!(q > p - 1.0)) throw DomainError("admissible_constant_data: needs q > p-1");
  if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("admissible_constant_data: safety must lie in (0, 1]");
  // S(eps) = eps^{1/(p-1)} S(1), so S(eps)^q <= eps iff eps^{q/(p-1) - 1} <= 1 / max S(1)^q.
  const double s1 = solve_tight(DiscreteFunction::constant(K.grid, 1.0), K).max_abs();
  const double e = q / (p - 1.0) - 1.0;
  const double eps = safety * std::pow(std::pow(s1, -q), 1.0 / e);
  return DiscreteFunction::constant(K.grid, eps);
}

LevelSetTrace stampacchia_bound(const DiscreteFunction& f, double m, const KernelMatrix& K, std::vector<double> h_lattice) {
  require_grid(f, K.grid);
  const Grid& grid = *K.grid;
  const ProblemSpec& spec = grid.spec();
  if (!(m > spec.dim / spec.ps())) throw DomainError("stampacchia_bound: needs m > N/(ps)");
  const double pstar = spec.critical_exponent();
  const double omega_exp = pstar * spec.beta;
  if (!(omega_exp < spec.dim)) throw DomainError("stampacchia_bound: d omega is not locally finite (p* beta >= N)");

  LevelSetTrace t;
  t.gamma = stampacchia_gamma(spec, m);
  const DiscreteFunction u = solve_tight(f, K);
  t.sup_norm = u.max_abs();

  std::vector<double> omega(grid.size());
  CompensatedSum dn;
  for (const Cell& c : grid.cells()) {
    omega[c.index] = weighted_length(c.lower, c.upper, omega_exp);
    const double fx = std::abs(f[c.index]) * std::pow(std::abs(c.center), omega_exp);
    dn.add(std::pow(fx, m) * omega[c.index]);
  }
  t.data_norm = std::pow(dn.value(), 1.0 / m);

  if (h_lattice.empty()) {
    const double top = std::max(t.sup_norm, 1e-300);
    for (int j = 1; j <= 64; ++j) h_lattice.push_back(1.25 * top * j / 64.0);
  }
  for (std::size_t j = 1; j < h_lattice.size(); ++j)
    if (!(h_lattice[j] > h_lattice[j - 1])) throw DomainError("stampacchia_bound: h_lattice must increase");
  t.h_lattice = h_lattice;
  for (double h : h_lattice) {
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (std::abs(u[i]) > h) s.add(omega[i]);
    t.phi_values.push_back(s.value());
    if (s.value() == 0.0 && !t.zero_level) t.zero_level = h;
  }

  std::vector<double> x, y;
  for (std::size_t j = 0; j + 1 < t.phi_values.size(); ++j)
    if (t.phi_values[j] > 0.0 && t.phi_values[j + 1] > 0.0) {
      x.push_back(std::log(t.phi_values[j]));
      y.push_back(std::log(t.phi_values[j + 1]));
    }
  t.fitted_exponent = fit_line(x, y).slope;

  if (!(t.gamma > 1.0)) {
    t.status = Status::violated;
    t.message = "recursion exponent gamma <= 1";
  } else if (!std::is_sorted(t.phi_values.rbegin(), t.phi_values.rend())) {
    t.status = Status::violated;
    t.message = "Phi is not nonincreasing";
  } else if (!t.zero_level) {
    t.status = Status::inconclusive;
    t.message = "Phi never reaches 0 on the lattice";
  } else if (*t.zero_level < t.sup_norm) {
    t.status = Status::violated;
    t.message = "Phi vanishes below the sup norm";
  }
  return t;
}

std::vector<double> bootstrap_exponents(const ProblemSpec& spec, double a0, int steps) {
  if (steps < 0) throw DomainError("bootstrap_exponents: steps must be nonnegative");
  const double p = spec.p;
  const double ratio = spec.critical_exponent() / p;
  std::vector<double> a{a0};
  for (int n = 0; n < steps; ++n) {
    const double next = (a.back() + p - 1.0) * ratio - (p - 1.0);
    if (!(next > a.back())) throw ConsistencyError("bootstrap_exponents: sequence stopped increasing");
    a.push_back(next);
  }
  return a;
}

}  // namespace wfpl
