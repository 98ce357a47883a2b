#include "wfpl/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "wfpl/error.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/quadrature.hpp"

namespace wfpl {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

struct Objective {
  double value;
  double scale;  // magnitude of the cancelling parts, for the roundoff allowance
};

Objective objective(const DiscreteFunction& u, const DiscreteFunction& f, const KernelMatrix& K, double p) {
  const double e = energy_seminorm(u, K, p) / p;
  const double l = pairing_dx(f, u);
  return {e - l, std::abs(e) + std::abs(l)};
}

// Flux and curvature of the difference energy |t|^p / p. For p < 2 both use
// the regularization t (t^2 + eps^2)^{(p-2)/2}: the exact flux has infinite
// slope at 0 and its residual cannot drop below w sqrt(ulp) there.
double flux(double t, double p, double eps) {
  if (p >= 2.0) return signed_power(t, p);
  return t * std::pow(t * t + eps * eps, 0.5 * (p - 2.0));
}

// newton: derivative of the flux. Otherwise flux(t)/t, which majorizes the
// energy for p < 2 and so never overshoots a vanishing difference.
double curvature(double t, double p, double eps, bool newton) {
  if (p >= 2.0) return (p - 1.0) * std::pow(std::max(std::abs(t), eps), p - 2.0);
  const double r = t * t + eps * eps;
  if (!newton) return std::pow(r, 0.5 * (p - 2.0));
  return std::pow(r, 0.5 * (p - 4.0)) * ((p - 1.0) * t * t + eps * eps);
}

double regularization(const DiscreteFunction& u) { return 1e-10 * (1.0 + u.max_abs()); }

std::vector<double> flux_gradient(const DiscreteFunction& u, const KernelMatrix& K, double p, double eps) {
  if (p >= 2.0) return energy_gradient(u, K, p);
  const std::size_t n = u.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* w = K.row(i);
    CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s.add(w[j] * flux(u[i] - u[j], p, eps));
    s.add(K.tail_weights[i] * flux(u[i], p, eps));
    g[i] = s.value();
  }
  return g;
}

Eigen::MatrixXd stiffness(const KernelMatrix& K) {
  const auto n = static_cast<Eigen::Index>(K.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = K.weight(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      S(i, j) = -w;
      S(i, i) += w;
    }
    S(i, i) += K.tail_weights[static_cast<std::size_t>(i)];
  }
  return S;
}

Eigen::MatrixXd hessian(const DiscreteFunction& u, const KernelMatrix& K, double p, double eps, bool newton) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      const double h = K.weight(si, sj) * curvature(u[si] - u[sj], p, eps, newton);
      H(i, j) = -h;
      H(j, i) = -h;
      H(i, i) += h;
      H(j, j) += h;
    }
    H(i, i) += K.tail_weights[si] * curvature(u[si], p, eps, newton);
  }
  return H;
}

}  // namespace

double default_tolerance(const DiscreteFunction& f) { return 1e-9 * (1.0 + f.l1_dx()); }

double stationarity_residual(const DiscreteFunction& u, const DiscreteFunction& f, const KernelMatrix& K) {
  require_same_grid(u, f);
  const std::vector<double> g = flux_gradient(u, K, K.grid->spec().p, regularization(u));
  CompensatedSum s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Cell& c = u.grid->cell(i);
    const double r = g[i] - f[i] * c.dx_measure;
    s.add(r * r / c.mu_measure);
  }
  return std::sqrt(s.value());
}

SolveReport solve_dirichlet(const DiscreteFunction& f, const KernelMatrix& K, const SolveOptions& options) {
  require_grid(f, K.grid);
  const double p = K.grid->spec().p;
  if (!(p > 1.0)) throw DomainError("solve_dirichlet: p must exceed 1");
  const double tol = options.tol > 0.0 ? options.tol : default_tolerance(f);
  if (!(tol > 0.0 && std::isfinite(tol))) throw DomainError("solve_dirichlet: tolerance must be positive");

  SolveReport rep;
  rep.tolerance = tol;
  DiscreteFunction u = options.initial ? *options.initial : DiscreteFunction::zeros(K.grid);
  require_grid(u, K.grid);
  if (f.max_abs() == 0.0) u = DiscreteFunction::zeros(K.grid);
  const std::size_t n = u.size();
  const bool degenerate = p > 2.0;
  const Eigen::MatrixXd S = degenerate ? stiffness(K) : Eigen::MatrixXd();
  double tau = degenerate ? 1e-3 : 0.0;
  const double tau_floor = degenerate ? 1e-10 : 0.0;

  Objective J = objective(u, f, K, p);
  rep.energy_trace.push_back(J.value);
  Eigen::VectorXd G(static_cast<Eigen::Index>(n));

  for (int it = 0;; ++it) {
    rep.final_gradient_norm = stationarity_residual(u, f, K);
    if (rep.final_gradient_norm <= tol) {
      rep.iterations = it;
      rep.energy_value = J.value;
      rep.solution = std::move(u);
      return rep;
    }
    if (it >= options.max_iterations)
      throw ConvergenceError("solve_dirichlet: no convergence after " + std::to_string(it) +
                                 " iterations (residual " + std::to_string(rep.final_gradient_norm) + ")",
                             rep.energy_trace);

    const double eps = regularization(u);
    const std::vector<double> g = flux_gradient(u, K, p, eps);
    for (std::size_t i = 0; i < n; ++i) G(static_cast<Eigen::Index>(i)) = g[i] - f[i] * u.grid->cell(i).dx_measure;

    auto direction = [&](const Eigen::MatrixXd& H) {
      for (;;) {
        Eigen::MatrixXd M = H;
        if (tau > 0.0) {
          if (degenerate)
            M += tau * S;
          else
            M.diagonal() += tau * H.diagonal();
        }
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() == Eigen::Success) {
          Eigen::VectorXd d = -llt.solve(G);
          if (d.allFinite()) return d;
        }
        tau = std::max(10.0 * tau, 1e-8);
        if (tau > 1e20)
          throw ConvergenceError("solve_dirichlet: Newton matrix is not positive definite", rep.energy_trace);
      }
    };

    DiscreteFunction trial = u;
    Objective Jt{};
    double alpha = 1.0;
    bool accepted = false;
    // p < 2 tries the full Newton step once, then the majorizing model with backtracking.
    const int attempts = p < 2.0 ? 2 : 1;
    for (int attempt = 0; attempt < attempts && !accepted; ++attempt) {
      const bool newton = attempt == 0;
      const Eigen::VectorXd d = direction(hessian(u, K, p, eps, newton));
      const double slope = G.dot(d);
      const int max_bt = (p < 2.0 && newton) ? 0 : kMaxBacktracks;
      alpha = 1.0;
      for (int bt = 0; bt <= max_bt; ++bt) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + alpha * d(static_cast<Eigen::Index>(i));
        Jt = objective(trial, f, K, p);
        const double allowance = 1e-14 * (J.scale + Jt.scale);
        if (Jt.value <= J.value + kArmijo * alpha * slope + allowance) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
        ++rep.line_search_backtracks;
      }
    }
    if (!accepted) {
      tau = std::max(10.0 * tau, 1e-6);
      if (tau > 1e20) throw ConvergenceError("solve_dirichlet: line search failed", rep.energy_trace);
      continue;
    }
    if (Jt.value > J.value + 1e-14 * (J.scale + Jt.scale))
      throw ConvergenceError("solve_dirichlet: energy increased on an accepted step", rep.energy_trace);
    if (alpha == 1.0)
      tau = std::max(tau / 10.0, tau_floor);
    else if (degenerate)
      tau *= 10.0;
    u = std::move(trial);
    J = Jt;
    rep.energy_trace.push_back(J.value);
  }
}

EstimateReport comparison_check(const DiscreteFunction& f1, const DiscreteFunction& f2, const KernelMatrix& K) {
  require_same_grid(f1, f2);
  for (std::size_t i = 0; i < f1.size(); ++i)
    if (!(f1[i] >= 0.0 && f1[i] <= f2[i]))
      throw ContractError("comparison_check: need 0 <= f1 <= f2 (cell " + std::to_string(i) + ")");
  SolveOptions o1, o2;
  o1.tol = 1e-2 * default_tolerance(f1);
  o2.tol = 1e-2 * default_tolerance(f2);
  const SolveReport s1 = solve_dirichlet(f1, K, o1);
  const SolveReport s2 = solve_dirichlet(f2, K, o2);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t where = 0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const double gap = s1.solution[i] - s2.solution[i];
    if (gap > worst) {
      worst = gap;
      where = i;
    }
  }
  EstimateReport r;
  r.name = "comparison";
  r.values["max_violation"] = std::max(worst, 0.0);
  r.values["max_difference"] = worst;
  r.values["worst_cell"] = static_cast<double>(where);
  if (worst > 1e-8) r.violate("u(f1) exceeds u(f2) by " + std::to_string(worst) + " at cell " + std::to_string(where));
  return r;
}

EstimateReport uniqueness_check(const DiscreteFunction& f, const KernelMatrix& K, int n_starts, std::uint64_t seed) {
  if (n_starts < 2) throw DomainError("uniqueness_check: need at least two starts");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double scale = 1.0 + f.max_abs();
  SolveOptions opt;
  opt.tol = 1e-2 * default_tolerance(f);
  std::vector<DiscreteFunction> sols;
  for (int s = 0; s < n_starts; ++s) {
    DiscreteFunction start = DiscreteFunction::zeros(K.grid);
    for (double& x : start.values) x = scale * unit(rng);
    opt.initial = start;
    sols.push_back(solve_dirichlet(f, K, opt).solution);
  }
  double spread = 0.0;
  for (std::size_t a = 0; a < sols.size(); ++a)
    for (std::size_t b = a + 1; b < sols.size(); ++b)
      for (std::size_t i = 0; i < f.size(); ++i) spread = std::max(spread, std::abs(sols[a][i] - sols[b][i]));
  EstimateReport r;
  r.name = "uniqueness";
  r.values["starts"] = n_starts;
  r.values["spread"] = spread;
  if (spread > 1e-7) r.violate("solutions from different starts differ by " + std::to_string(spread));
  return r;
}

double rayleigh_quotient(const DiscreteFunction& u, const KernelMatrix& K) {
  const double p = K.grid->spec().p;
  CompensatedSum d;
  for (std::size_t i = 0; i < u.size(); ++i) d.add(std::pow(std::abs(u[i]), p) * u.grid->cell(i).dx_measure);
  if (!(d.value() > 0.0)) throw DomainError("rayleigh_quotient: u must be nonzero");
  return energy_seminorm(u, K, p) / d.value();
}

EigenReport first_eigenvalue(const KernelMatrix& K, double tol) {
  if (!(tol > 0.0)) throw DomainError("first_eigenvalue: tolerance must be positive");
  const double p = K.grid->spec().p;
  auto normalize = [p](DiscreteFunction& u) {
    CompensatedSum s;
    for (std::size_t i = 0; i < u.size(); ++i) s.add(std::pow(std::abs(u[i]), p) * u.grid->cell(i).dx_measure);
    const double c = std::pow(s.value(), -1.0 / p);
    for (double& x : u.values) x *= c;
  };
  auto power_load = [p](const DiscreteFunction& u) {
    DiscreteFunction out = u;
    for (double& x : out.values) x = signed_power(x, p);
    return out;
  };

  EigenReport rep;
  DiscreteFunction u = DiscreteFunction::constant(K.grid, 1.0);
  normalize(u);
  double lambda = rayleigh_quotient(u, K);
  rep.rayleigh_trace.push_back(lambda);
  constexpr int kMaxIterations = 5000;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const DiscreteFunction load = power_load(u);
    SolveOptions opt;
    opt.tol = 1e-2 * default_tolerance(load);
    DiscreteFunction guess = u;
    for (double& x : guess.values) x *= std::pow(lambda, -1.0 / (p - 1.0));
    opt.initial = guess;
    DiscreteFunction v = solve_dirichlet(load, K, opt).solution;
    normalize(v);
    const double next = rayleigh_quotient(v, K);
    rep.rayleigh_trace.push_back(next);
    if (next > lambda * (1.0 + 1e-9))
      throw ConvergenceError("first_eigenvalue: Rayleigh quotient increased", rep.rayleigh_trace);
    const double change = std::abs(lambda - next);
    u = std::move(v);
    lambda = next;

    const DiscreteFunction Au = apply_operator(u, K, p);
    DiscreteFunction target = load_density(power_load(u));
    for (double& x : target.values) x *= lambda;
    DiscreteFunction diff = Au;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= target[i];
    const double residual = norm_mu(diff);
    if (change <= tol * lambda && residual <= std::sqrt(tol) * norm_mu(target)) {
      rep.lambda1 = lambda;
      rep.residual = residual;
      rep.iterations = it;
      for (double& x : u.values) x = std::max(x, 0.0);
      rep.eigenfunction = std::move(u);
      if (!(rep.lambda1 > 0.0)) throw ConvergenceError("first_eigenvalue: nonpositive eigenvalue", rep.rayleigh_trace);
      return rep;
    }
  }
  throw ConvergenceError("first_eigenvalue: no convergence", rep.rayleigh_trace);
}

}  // namespace wfpl
