#include "wfpl/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfpl/entropy.hpp"
#include "wfpl/error.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/quadrature.hpp"
#include "wfpl/solver.hpp"

namespace wfpl {
namespace {

void require_positive(const DiscreteFunction& v, const char* who) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0)) throw ContractError(std::string(who) + ": v must be positive (cell " + std::to_string(i) + ")");
}

void require_radius(const Grid& g, double r, const char* who) {
  if (!(r > 0.0 && r <= g.spec().domain_radius))
    throw DomainError(std::string(who) + ": ball does not fit in Omega");
}

double power_mean(const DiscreteFunction& v, const std::vector<std::size_t>& idx, double q) {
  CompensatedSum num, den;
  for (std::size_t i : idx) {
    const double mu = v.grid->cell(i).mu_measure;
    num.add(std::pow(v[i], q) * mu);
    den.add(mu);
  }
  return std::pow(num.value() / den.value(), 1.0 / q);
}

double ball_min(const DiscreteFunction& v, const std::vector<std::size_t>& idx) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) m = std::min(m, v[i]);
  return m;
}

double mu_of(const Grid& g, const std::vector<std::size_t>& idx) {
  CompensatedSum s;
  for (std::size_t i : idx) s.add(g.cell(i).mu_measure);
  return s.value();
}

// Largest level k with mu(B_r cap {v >= k}) >= sigma mu(B_r).
double median_level(const DiscreteFunction& v, double r, double sigma) {
  std::vector<std::size_t> idx = v.grid->ball(r);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  const double target = sigma * mu_of(*v.grid, idx);
  double acc = 0.0;
  for (std::size_t i : idx) {
    acc += v.grid->cell(i).mu_measure;
    if (acc >= target) return v[i];
  }
  return v[idx.back()];
}

double relative_change(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace

double supersolution_residual(const DiscreteFunction& v, const DiscreteFunction& f, const KernelMatrix& K) {
  require_same_grid(v, f);
  const DiscreteFunction Av = apply_operator(v, K, K.grid->spec().p);
  const DiscreteFunction b = load_density(f);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::min(worst, Av[i] - b[i]);
  return worst;
}

HarnackReport weak_harnack_check(const DiscreteFunction& v, double r, double q_h, const KernelMatrix& K,
                                 const std::optional<DiscreteFunction>& f) {
  require_grid(v, K.grid);
  const Grid& g = *K.grid;
  const ProblemSpec& spec = g.spec();
  if (!(q_h > 0.0 && q_h < spec.harnack_q_limit()))
    throw DomainError("weak_harnack_check: q_h must lie in (0, N(p-1)/(N-ps))");
  require_radius(g, 1.5 * r, "weak_harnack_check");
  require_positive(v, "weak_harnack_check");
  const DiscreteFunction data = f ? *f : DiscreteFunction::zeros(K.grid);
  for (double x : data.values)
    if (x < 0.0) throw ContractError("weak_harnack_check: data must be nonnegative");
  const double scale = 1.0 + load_density(data).max_abs();
  const double worst = supersolution_residual(v, data, K);
  if (worst < -1e-7 * scale)
    throw ContractError("weak_harnack_check: not a supersolution, worst residual " + std::to_string(worst));

  HarnackReport h;
  h.r = r;
  h.q_h = q_h;
  h.lhs = power_mean(v, g.ball(r), q_h);
  h.rhs_inf = ball_min(v, g.ball(1.5 * r));
  h.ratio = h.lhs / h.rhs_inf;
  return h;
}

EstimateReport log_estimate_check(const DiscreteFunction& v, const std::vector<double>& radii, const KernelMatrix& K) {
  require_grid(v, K.grid);
  const Grid& g = *K.grid;
  const double p = g.spec().p;
  for (double x : v.values)
    if (!(x > 0.0)) throw DomainError("log_estimate_check: v must be positive");
  EstimateReport rep;
  rep.name = "log_estimate";
  Series s;
  s.columns = {"r", "sum", "ratio"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double r : radii) {
    require_radius(g, 8.0 * r, "log_estimate_check");
    const std::vector<std::size_t> idx = g.ball(6.0 * r);
    CompensatedSum sum;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const double d = std::abs(std::log(v[idx[a]]) - std::log(v[idx[b]]));
        if (d > 0.0) sum.add(K.weight(idx[a], idx[b]) * std::pow(d, p));
      }
    const double ratio = sum.value() / std::pow(r, g.spec().log_estimate_exponent());
    s.add({r, sum.value(), ratio});
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  rep.series["log_estimate"] = s;
  rep.values["ratio_min"] = lo;
  rep.values["ratio_max"] = hi;
  if (!std::isfinite(hi)) rep.violate("log estimate is not finite");
  else if (hi > 50.0 * lo && hi > 0.0) rep.violate("log estimate ratios spread beyond a factor 50");
  return rep;
}

EstimateReport level_set_lemma_check(const DiscreteFunction& v, double k, double sigma,
                                     const std::vector<double>& deltas, double r) {
  const Grid& g = *v.grid;
  require_radius(g, 6.0 * r, "level_set_lemma_check");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw DomainError("level_set_lemma_check: sigma must lie in (0, 1]");
  for (double d : deltas)
    if (!(d > 0.0 && d < 0.25)) throw DomainError("level_set_lemma_check: delta must lie in (0, 1/4)");
  EstimateReport rep;
  rep.name = "level_set";
  const std::vector<std::size_t> inner = g.ball(r);
  CompensatedSum above;
  for (std::size_t i : inner)
    if (v[i] >= k) above.add(g.cell(i).mu_measure);
  const double fraction = above.value() / mu_of(g, inner);
  rep.values["hypothesis_fraction"] = fraction;
  if (fraction < sigma) {
    rep.status = Status::hypothesis_not_met;
    rep.message = "mu(B_r cap {v >= k}) < sigma mu(B_r)";
    return rep;
  }
  std::vector<double> ds = deltas;
  std::sort(ds.begin(), ds.end(), std::greater<>());
  const std::vector<std::size_t> outer = g.ball(6.0 * r);
  const double outer_mu = mu_of(g, outer);
  Series s;
  s.columns = {"delta", "ratio", "implied_constant"};
  double prev = std::numeric_limits<double>::infinity();
  for (double d : ds) {
    CompensatedSum low;
    for (std::size_t i : outer)
      if (v[i] <= 2.0 * d * k) low.add(g.cell(i).mu_measure);
    const double ratio = low.value() / outer_mu;
    const double c = ratio * sigma * std::log(1.0 / (2.0 * d));
    s.add({d, ratio, c});
    rep.values["implied_constant_delta_" + std::to_string(d)] = c;
    if (ratio > prev) rep.violate("sublevel ratio increased as delta decreased");
    prev = ratio;
  }
  rep.series["level_set"] = s;
  return rep;
}

EstimateReport positivity_expansion_check(const DiscreteFunction& v, double k, double sigma, double r) {
  const Grid& g = *v.grid;
  require_radius(g, 4.0 * r, "positivity_expansion_check");
  if (!(k > 0.0)) throw DomainError("positivity_expansion_check: k must be positive");
  EstimateReport rep;
  rep.name = "positivity_expansion";
  const std::vector<std::size_t> inner = g.ball(r);
  CompensatedSum above;
  for (std::size_t i : inner)
    if (v[i] >= k) above.add(g.cell(i).mu_measure);
  if (above.value() < sigma * mu_of(g, inner)) {
    rep.status = Status::hypothesis_not_met;
    rep.message = "mu(B_r cap {v >= k}) < sigma mu(B_r)";
    return rep;
  }
  const double inf = ball_min(v, g.ball(4.0 * r));
  if (!(inf > 0.0)) throw ContractError("positivity_expansion_check: v must be positive on B_{4r}");
  rep.values["delta_star"] = inf / k;
  rep.values["inf_B4r"] = inf;
  return rep;
}

EstimateReport reverse_holder_check(const DiscreteFunction& v, double alpha1, double alpha2, double r) {
  const Grid& g = *v.grid;
  const double limit = g.spec().harnack_q_limit();
  if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < limit))
    throw DomainError("reverse_holder_check: need 0 < alpha1 < alpha2 < N(p-1)/(N-ps)");
  require_radius(g, 1.5 * r, "reverse_holder_check");
  require_positive(v, "reverse_holder_check");
  EstimateReport rep;
  rep.name = "reverse_holder";
  const double lhs = power_mean(v, g.ball(r), alpha2);
  const double rhs = power_mean(v, g.ball(1.5 * r), alpha1);
  rep.values["lhs"] = lhs;
  rep.values["rhs"] = rhs;
  rep.values["constant"] = lhs / rhs;
  if (!std::isfinite(lhs / rhs)) rep.violate("reverse Holder constant is not finite");
  return rep;
}

EstimateReport poincare_wirtinger_check(const DiscreteFunction& w, const DiscreteFunction& psi, const KernelMatrix& K) {
  require_grid(w, K.grid);
  require_same_grid(w, psi);
  const Grid& g = *K.grid;
  const double p = g.spec().p;
  if (psi.max_abs() == 0.0) throw DomainError("poincare_wirtinger_check: psi vanishes identically");
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(g.cell(a).center) < std::abs(g.cell(b).center); });
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double x = psi[order[j]];
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("poincare_wirtinger_check: psi must lie in [0, 1]");
    if (j > 0 && std::abs(g.cell(order[j]).center) > std::abs(g.cell(order[j - 1]).center) && x > psi[order[j - 1]])
      throw DomainError("poincare_wirtinger_check: psi must be nonincreasing in |x|");
  }

  CompensatedSum num, den;
  for (std::size_t i = 0; i < g.size(); ++i) {
    num.add(w[i] * psi[i] * g.cell(i).mu_measure);
    den.add(psi[i] * g.cell(i).mu_measure);
  }
  const double W = num.value() / den.value();
  CompensatedSum lhs, rhs;
  bool constant_on_support = true;
  double ref = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (psi[i] > 0.0) {
      if (std::isnan(ref)) ref = w[i];
      else if (w[i] != ref) constant_on_support = false;
    }
    const double d = std::abs(w[i] - W);
    if (d > 0.0) lhs.add(std::pow(d, p) * psi[i] * g.cell(i).mu_measure);
    const double* row = K.row(i);
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double m = std::min(psi[i], psi[j]);
      const double dd = std::abs(w[i] - w[j]);
      if (m > 0.0 && dd > 0.0) rhs.add(row[j] * std::pow(dd, p) * m);
    }
  }
  EstimateReport rep;
  rep.name = "poincare_wirtinger";
  rep.values["mean"] = W;
  rep.values["lhs"] = lhs.value();
  rep.values["rhs"] = 2.0 * rhs.value();
  rep.values["constant"] = rhs.value() > 0.0 ? lhs.value() / (2.0 * rhs.value()) : 0.0;
  const double tiny = 1e-13 * std::pow(1.0 + w.max_abs(), p) * g.total_mu_measure();
  if (constant_on_support && lhs.value() > tiny) rep.violate("LHS positive for a function constant on supp psi");
  if (!constant_on_support && !(lhs.value() > 0.0)) rep.violate("LHS vanishes for a nonconstant function");
  if (lhs.value() > 0.0 && !(rhs.value() > 0.0)) rep.violate("RHS vanishes while LHS is positive");
  return rep;
}

DiscreteFunction default_psi(const GridPtr& grid) {
  return DiscreteFunction::sample(grid, [](double x) { return std::max(0.0, 1.0 - std::abs(x)); });
}

namespace {

struct LevelConstants {
  HarnackReport harnack;
  std::vector<EstimateReport> reports;
  std::map<std::string, double> values;
};

LevelConstants evaluate_level(const DiscreteFunction& v, const DiscreteFunction& f, const KernelMatrix& K,
                              const HarnackSuiteConfig& cfg) {
  const ProblemSpec& spec = K.grid->spec();
  const double limit = spec.harnack_q_limit();
  LevelConstants out;
  out.harnack = weak_harnack_check(v, cfg.harnack_radius, cfg.q_fraction * limit, K, f);
  out.values["harnack_ratio"] = out.harnack.ratio;

  EstimateReport log_rep = log_estimate_check(v, cfg.log_radii, K);
  const auto ratios = log_rep.series.at("log_estimate").column("ratio");
  for (std::size_t i = 0; i < ratios.size(); ++i)
    out.values["log_ratio_r" + std::to_string(cfg.log_radii[i])] = ratios[i];
  out.reports.push_back(std::move(log_rep));

  const double k_level = median_level(v, cfg.level_radius, cfg.sigma);
  EstimateReport level = level_set_lemma_check(v, k_level, cfg.sigma, cfg.deltas, cfg.level_radius);
  if (level.series.count("level_set")) {
    const auto& s = level.series.at("level_set");
    double c = 0.0;
    for (const auto& row : s.rows) c = std::max(c, row[2]);
    out.values["level_set_constant"] = c;
  }
  out.reports.push_back(std::move(level));

  const double k_exp = median_level(v, cfg.expansion_radius, cfg.sigma);
  EstimateReport expansion = positivity_expansion_check(v, k_exp, cfg.sigma, cfg.expansion_radius);
  if (expansion.values.count("delta_star")) out.values["expansion_delta_star"] = expansion.values.at("delta_star");
  out.reports.push_back(std::move(expansion));

  EstimateReport holder =
      reverse_holder_check(v, cfg.alpha1_fraction * limit, cfg.alpha2_fraction * limit, cfg.holder_radius);
  out.values["reverse_holder_constant"] = holder.values.at("constant");
  out.reports.push_back(std::move(holder));

  EstimateReport pw = poincare_wirtinger_check(v, default_psi(K.grid), K);
  out.values["poincare_constant"] = pw.values.at("constant");
  out.reports.push_back(std::move(pw));
  return out;
}

}  // namespace

HarnackSuiteResult run_harnack_suite(const ProblemSpec& spec, const HarnackSuiteConfig& cfg) {
  spec.validate();
  if (cfg.mesh_levels.empty()) throw ConfigError("harnack suite needs at least one mesh level");
  HarnackSuiteResult res;
  res.summary.name = "harnack_suite";
  const double p = spec.p;
  for (std::size_t level = 0; level < cfg.mesh_levels.size(); ++level) {
    const GridPtr grid = make_grid(spec, cfg.mesh_levels[level]);
    const KernelMatrix K = assemble_kernel(grid);
    const DiscreteFunction f = spike_data(grid, 1.0);
    SolveOptions opt;
    opt.tol = 1e-2 * default_tolerance(f);
    const DiscreteFunction v = solve_dirichlet(f, K, opt).solution;

    LevelConstants c = evaluate_level(v, f, K, cfg);
    res.harnack.mesh_levels.push_back(c.harnack.ratio);
    for (const auto& [name, value] : c.values) res.constants[name].push_back(value);
    for (const auto& rep : c.reports)
      if (rep.status == Status::violated) res.summary.violate(rep.name + " at " + std::to_string(grid->size()) + " cells: " + rep.message);
      else if (rep.status == Status::hypothesis_not_met)
        res.summary.inconclusive(rep.name + " hypothesis not met at " + std::to_string(grid->size()) + " cells");

    DiscreteFunction v2 = v;
    for (double& x : v2.values) x *= 2.0;
    DiscreteFunction f2 = f;
    for (double& x : f2.values) x *= std::pow(2.0, p - 1.0);
    LevelConstants c2 = evaluate_level(v2, f2, K, cfg);
    for (const auto& [name, value] : c.values) {
      const double d = relative_change(value, c2.values.at(name));
      res.scale_defects[name] = std::max(res.scale_defects[name], d);
    }

    const DiscreteFunction one = DiscreteFunction::constant(grid, 1.0);
    const DiscreteFunction w = solve_dirichlet(one, K, opt).solution;
    DiscreteFunction m = v;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(v[i], w[i]);
    DiscreteFunction zero = DiscreteFunction::zeros(grid);
    res.closure["min_residual_" + std::to_string(grid->size())] = supersolution_residual(m, zero, K);

    if (level + 1 == cfg.mesh_levels.size()) {
      const HarnackReport h = c.harnack;
      res.harnack.r = h.r;
      res.harnack.q_h = h.q_h;
      res.harnack.lhs = h.lhs;
      res.harnack.rhs_inf = h.rhs_inf;
      res.harnack.ratio = h.ratio;
      res.finest = std::move(c.reports);
    }
  }

  for (const auto& [name, vals] : res.constants) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool finite = vals.size() == cfg.mesh_levels.size();
    for (double x : vals) {
      finite = finite && std::isfinite(x);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double spread = (lo > 0.0) ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    res.summary.values["spread_" + name] = spread;
    if (!finite) res.summary.violate(name + " is not finite at every level");
    else if (spread > cfg.stability_factor) res.summary.violate(name + " varies by " + std::to_string(spread) + " across levels");
  }
  for (const auto& [name, d] : res.scale_defects) {
    res.summary.values["scale_defect_" + name] = d;
    if (d > cfg.scale_tolerance) res.summary.violate(name + " changes under v -> 2v by " + std::to_string(d));
  }
  return res;
}

}  // namespace wfpl
