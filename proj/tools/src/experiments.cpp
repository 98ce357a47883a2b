#include "wfpl_cli/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <random>
#include <sstream>

#include "wfpl/entropy.hpp"
#include "wfpl/error.hpp"
#include "wfpl/harnack.hpp"
#include "wfpl/io.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/reaction.hpp"
#include "wfpl/solver.hpp"

namespace wfpl::cli {
namespace {

using nlohmann::json;

struct Context {
  const ExperimentConfig& cfg;
  ExperimentResult& out;

  void log(const std::string& line) { out.log.push_back(line); }

  void add_report(const EstimateReport& r) {
    json j;
    j["status"] = std::string(to_string(r.status));
    j["message"] = r.message;
    j["values"] = json::object();
    for (const auto& [k, v] : r.values) j["values"][k] = v;
    out.summary["reports"][r.name] = j;
    for (const auto& [k, s] : r.series) out.series[r.name + "_" + k] = s;
    log(r.name + ": " + std::string(to_string(r.status)) + (r.message.empty() ? "" : " (" + r.message + ")"));
    if (r.status == Status::violated) out.exit_code = kExitViolation;
  }
};

GridPtr grid_for(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.grading == 1.0) return make_grid(cfg.spec, n);
  return std::make_shared<const Grid>(build_graded_grid(cfg.spec, n, cfg.grading));
}

KernelMatrix kernel_for(const ExperimentConfig& cfg, const GridPtr& grid) {
  KernelOptions opt;
  opt.quadrature_order = cfg.quadrature_order;
  if (!cfg.kernel_cache.empty()) return cached_kernel(cfg.kernel_cache, grid, opt);
  return assemble_kernel(grid, opt);
}

DiscreteFunction data_for(const ExperimentConfig& cfg, const GridPtr& grid) {
  if (cfg.data == "zero") return DiscreteFunction::zeros(grid);
  if (cfg.data == "constant") return DiscreteFunction::constant(grid, cfg.data_value);
  if (cfg.data == "spike") return spike_data(grid, cfg.data_value);
  try {
    return from_csv(grid, read_text_file(cfg.data));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("data file " + cfg.data + ": " + e.what());
  }
}

SolveOptions solve_options(const ExperimentConfig& cfg) {
  SolveOptions o;
  o.tol = cfg.tol;
  o.max_iterations = cfg.max_iterations;
  return o;
}

json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Series function_series(const DiscreteFunction& u) {
  Series s;
  s.columns = {"index", "center", "value"};
  for (std::size_t i = 0; i < u.size(); ++i) s.add({static_cast<double>(i), u.grid->cell(i).center, u[i]});
  return s;
}

void run_assemble(Context& c) {
  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  const std::size_t n = K.size();
  double asym = 0.0, min_w = INFINITY, tail_sum = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = K.weight(i, j);
      finite = finite && std::isfinite(w);
      asym = std::max(asym, std::abs(w - K.weight(j, i)));
      if (i != j) min_w = std::min(min_w, w);
    }
    finite = finite && std::isfinite(K.tail_weights[i]);
    tail_sum += K.tail_weights[i];
  }
  EstimateReport r;
  r.name = "kernel_invariants";
  r.values["max_asymmetry"] = asym;
  r.values["min_pair_weight"] = min_w;
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag = std::max(diag, std::abs(K.weight(i, i)));
  r.values["max_diagonal"] = diag;
  if (!finite) r.violate("non-finite kernel entry");
  if (asym != 0.0) r.violate("pair weights are not symmetric");
  if (diag != 0.0) r.violate("nonzero diagonal");
  if (min_w < 0.0) r.violate("negative pair weight");
  c.add_report(r);

  c.out.summary["results"]["n_cells"] = n;
  c.out.summary["results"]["quadrature_order"] = K.quadrature_order;
  c.out.summary["results"]["kernel_order"] = K.kernel_order;
  c.out.summary["results"]["truncation_error_bound"] = K.truncation_error_bound;
  c.out.summary["results"]["tail_sum"] = tail_sum;
  Series tails;
  tails.columns = {"index", "center", "tail_weight", "mu_measure"};
  for (std::size_t i = 0; i < n; ++i)
    tails.add({static_cast<double>(i), grid->cell(i).center, K.tail_weights[i], grid->cell(i).mu_measure});
  c.out.series["tails"] = tails;
}

void run_solve(Context& c) {
  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  const DiscreteFunction f = data_for(c.cfg, grid);
  const SolveReport s = solve_dirichlet(f, K, solve_options(c.cfg));
  auto& r = c.out.summary["results"];
  r["iterations"] = s.iterations;
  r["final_gradient_norm"] = s.final_gradient_norm;
  r["tolerance"] = s.tolerance;
  r["energy_value"] = s.energy_value;
  r["line_search_backtracks"] = s.line_search_backtracks;
  r["sup_norm"] = s.solution.max_abs();
  r["solution"] = vector_json(s.solution.values);
  c.out.series["solution"] = function_series(s.solution);
  Series trace;
  trace.columns = {"iteration", "energy"};
  for (std::size_t i = 0; i < s.energy_trace.size(); ++i) trace.add({static_cast<double>(i), s.energy_trace[i]});
  c.out.series["energy_trace"] = trace;
  c.log("solve: " + std::to_string(s.iterations) + " iterations, residual " + std::to_string(s.final_gradient_norm));
  EstimateReport conv;
  conv.name = "stationarity";
  conv.values["residual"] = s.final_gradient_norm;
  conv.values["tolerance"] = s.tolerance;
  if (!(s.final_gradient_norm <= s.tolerance)) conv.violate("residual above tolerance");
  c.add_report(conv);
}

void run_eigen(Context& c) {
  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  const EigenReport e = first_eigenvalue(K, c.cfg.tol > 0.0 ? c.cfg.tol : 1e-10);
  auto& r = c.out.summary["results"];
  r["lambda1"] = e.lambda1;
  r["residual"] = e.residual;
  r["iterations"] = e.iterations;
  c.out.series["eigenfunction"] = function_series(e.eigenfunction);
  Series trace;
  trace.columns = {"iteration", "rayleigh"};
  for (std::size_t i = 0; i < e.rayleigh_trace.size(); ++i) trace.add({static_cast<double>(i), e.rayleigh_trace[i]});
  c.out.series["rayleigh"] = trace;
  EstimateReport pos;
  pos.name = "eigenfunction_sign";
  pos.values["min"] = e.eigenfunction.min();
  if (e.eigenfunction.min() < 0.0) pos.violate("first eigenfunction changes sign");
  c.add_report(pos);
  c.log("eigen: lambda1 = " + std::to_string(e.lambda1));
}

void run_entropy(Context& c) {
  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  const DiscreteFunction f = data_for(c.cfg, grid);
  std::vector<double> levels = c.cfg.levels;
  if (levels.empty()) levels = {1, 2, 4, 8, 16, 32, 64};
  EstimateConfig ec;
  ec.alpha = c.cfg.alpha;
  ec.q_s1_pairs = c.cfg.besov_pairs;
  ec.validate(c.cfg.spec);
  const SchemeTrace tr = run_scheme(f, levels, K, ec);
  c.add_report(truncation_energy_bound(tr));
  c.add_report(marcinkiewicz_estimate(tr, c.cfg.spec));
  if (!ec.q_s1_pairs.empty()) c.add_report(besov_estimate(tr, ec, c.cfg.spec));
  c.add_report(entropy_tail_check(tr, f, K));
  if (tr.levels.size() >= 3) c.add_report(strong_Tk_convergence(tr, {}, K));

  auto& r = c.out.summary["results"];
  r["levels"] = vector_json(tr.levels);
  r["data_l1"] = vector_json(tr.data_l1);
  std::vector<double> its(tr.solver_iterations.begin(), tr.solver_iterations.end());
  r["solver_iterations"] = vector_json(its);
  r["monotonicity_defect"] = tr.monotonicity_defect;
  r["marcinkiewicz_slope"] = tr.marcinkiewicz_fit.slope;
  r["marcinkiewicz_exponent"] = c.cfg.spec.marcinkiewicz_exponent();
  Series dist;
  dist.columns = {"k", "phi"};
  for (std::size_t i = 0; i < tr.k_lattice.size(); ++i) dist.add({tr.k_lattice[i], tr.distribution[i]});
  c.out.series["distribution"] = dist;
  Series te;
  te.columns = {"level", "k", "energy"};
  for (std::size_t l = 0; l < tr.levels.size(); ++l)
    for (std::size_t i = 0; i < tr.k_lattice.size(); ++i) te.add({tr.levels[l], tr.k_lattice[i], tr.truncation_energies[l][i]});
  c.out.series["truncation_energies"] = te;
  Series et;
  et.columns = {"level", "h", "tail"};
  for (std::size_t l = 0; l < tr.levels.size(); ++l)
    for (std::size_t i = 0; i < tr.h_lattice.size(); ++i) et.add({tr.levels[l], tr.h_lattice[i], tr.entropy_tails[l][i]});
  c.out.series["entropy_tails"] = et;
  c.out.series["solution"] = function_series(tr.solutions.back());
}

void run_reaction(Context& c) {
  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  const ProblemSpec& spec = c.cfg.spec;
  const double q = spec.q_exponent, lambda = spec.lambda, p = spec.p;
  const bool superlinear = q > p - 1.0;
  DiscreteFunction g = (superlinear && c.cfg.data == "spike") ? admissible_constant_data(K, q) : data_for(c.cfg, grid);
  for (double x : g.values)
    if (x < 0.0) throw ConfigError("reaction-run needs nonnegative data g");
  SolveOptions so = solve_options(c.cfg);
  so.tol = 1e-2 * default_tolerance(g);
  const DiscreteFunction w = solve_dirichlet(g, K, so).solution;
  double lambda1 = 0.0;
  if (q == p - 1.0) lambda1 = first_eigenvalue(K).lambda1;
  const RegimeReport regime = regime_classify(lambda, q, spec, lambda1, g, w);
  auto& r = c.out.summary["results"];
  r["regime"] = std::string(to_string(regime.regime));
  r["regime_message"] = regime.message;
  if (regime.lambda_bar) r["lambda_bar"] = *regime.lambda_bar;
  if (q == p - 1.0) r["lambda1"] = lambda1;
  if (regime.witness_cell) r["witness_cell"] = *regime.witness_cell;
  r["data_level"] = g.max();
  c.log("regime: " + std::string(to_string(regime.regime)) + " (" + regime.message + ")");
  if (regime.regime == Regime::superlinear_condition_failed)
    c.log("warning: superlinear admissibility does not hold; iterating anyway");

  ReactionOptions ro;
  ro.max_iterations = std::min(c.cfg.max_iterations, 500);
  const ReactionOutcome o = monotone_iterate(g, lambda, q, K, ro);
  r["status"] = std::string(to_string(o.status));
  if (regime.regime == Regime::superlinear_condition_failed && regime.witness_cell)
    r["status"] = std::string(to_string(ReactionStatus::condition_violated));
  r["iteration_status"] = std::string(to_string(o.status));
  r["iterations"] = o.iterations;
  r["fixed_point_residual"] = o.residual;
  r["iterate_norms"] = vector_json(o.iterate_norms);
  Series norms;
  norms.columns = {"iteration", "sup_norm"};
  for (std::size_t i = 0; i < o.iterate_norms.size(); ++i) norms.add({static_cast<double>(i), o.iterate_norms[i]});
  c.out.series["iterate_norms"] = norms;
  c.log("monotone iteration: " + std::string(to_string(o.status)) + " after " + std::to_string(o.iterations) + " steps");
  if (o.solution) {
    c.out.series["solution"] = function_series(*o.solution);
    c.add_report(minimality_check(*o.solution, g, lambda, q, K));
  }
  if (superlinear && !regime.witness_cell) c.add_report(supersolution_check(g, q, K));
}

void run_harnack(Context& c) {
  HarnackSuiteConfig hc;
  if (!c.cfg.levels.empty()) {
    hc.mesh_levels.clear();
    for (double x : c.cfg.levels) {
      if (!(x >= 2.0 && std::floor(x) == x && static_cast<long long>(x) % 2 == 0))
        throw ConfigError("harnack-suite levels must be even cell counts");
      hc.mesh_levels.push_back(static_cast<std::size_t>(x));
    }
  }
  const HarnackSuiteResult res = run_harnack_suite(c.cfg.spec, hc);
  for (const auto& rep : res.finest) c.add_report(rep);
  c.add_report(res.summary);
  auto& r = c.out.summary["results"];
  for (const auto& [name, vals] : res.constants) r["constants"][name] = vector_json(vals);
  for (const auto& [name, d] : res.scale_defects) r["scale_defects"][name] = d;
  for (const auto& [name, d] : res.closure) r["closure"][name] = d;
  Series s;
  s.columns = {"r", "q_h", "lhs", "rhs", "ratio", "mesh_level"};
  for (std::size_t l = 0; l < res.harnack.mesh_levels.size(); ++l)
    s.add({res.harnack.r, res.harnack.q_h, l + 1 == res.harnack.mesh_levels.size() ? res.harnack.lhs : NAN,
           l + 1 == res.harnack.mesh_levels.size() ? res.harnack.rhs_inf : NAN, res.harnack.mesh_levels[l],
           static_cast<double>(hc.mesh_levels[l])});
  c.out.series["harnack"] = s;
}

void run_inequalities(Context& c) {
  const double p = c.cfg.spec.p;
  c.add_report(check_algebraic_inequalities(p, c.cfg.alpha, c.cfg.samples, c.cfg.seed));

  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  std::mt19937_64 rng(c.cfg.seed);
  std::uniform_real_distribution<double> load(0.5, 1.5), unit(-1.0, 1.0);
  EstimateReport pic;
  pic.name = "picone_trials";
  int violations = 0;
  double worst_gap = INFINITY, equality_defect = 0.0;
  for (int t = 0; t < c.cfg.trials; ++t) {
    DiscreteFunction f = DiscreteFunction::zeros(grid);
    for (double& x : f.values) x = load(rng);
    SolveOptions so;
    so.tol = 1e-2 * default_tolerance(f);
    const DiscreteFunction w = solve_dirichlet(f, K, so).solution;
    DiscreteFunction v = DiscreteFunction::zeros(grid);
    for (double& x : v.values) x = unit(rng);
    const EstimateReport r = picone_check(w, v, K, p);
    if (r.status == Status::violated) ++violations;
    worst_gap = std::min(worst_gap, r.values.at("gap") / (1.0 + r.values.at("lhs")));
    if (t == 0) {
      const EstimateReport eq = picone_check(w, w, K, p);
      equality_defect = std::abs(eq.values.at("gap")) / (1.0 + eq.values.at("lhs"));
    }
  }
  pic.values["trials"] = c.cfg.trials;
  pic.values["violations"] = violations;
  pic.values["min_relative_gap"] = worst_gap;
  pic.values["equality_defect"] = equality_defect;
  if (violations > 0) pic.violate(std::to_string(violations) + " Picone violations");
  if (equality_defect > 1e-9) pic.violate("Picone equality at v = w fails");
  c.add_report(pic);
}

void run_stampacchia(Context& c) {
  const GridPtr grid = grid_for(c.cfg, c.cfg.n_cells);
  const KernelMatrix K = kernel_for(c.cfg, grid);
  const DiscreteFunction f = c.cfg.data == "spike" ? DiscreteFunction::constant(grid, 1.0) : data_for(c.cfg, grid);
  const double m = c.cfg.m > 0.0 ? c.cfg.m : 2.0 * c.cfg.spec.dim / c.cfg.spec.ps();
  LevelSetTrace t;
  try {
    t = stampacchia_bound(f, m, K);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("stampacchia: ") + e.what());
  }
  auto& r = c.out.summary["results"];
  r["m"] = m;
  r["gamma"] = t.gamma;
  r["fitted_exponent"] = t.fitted_exponent;
  r["sup_norm"] = t.sup_norm;
  r["data_norm"] = t.data_norm;
  if (t.zero_level) r["zero_level"] = *t.zero_level;
  Series s;
  s.columns = {"h", "phi"};
  for (std::size_t i = 0; i < t.h_lattice.size(); ++i) s.add({t.h_lattice[i], t.phi_values[i]});
  c.out.series["phi"] = s;
  EstimateReport rep;
  rep.name = "stampacchia";
  rep.status = t.status;
  rep.message = t.message;
  rep.values["gamma"] = t.gamma;
  c.add_report(rep);
  const std::vector<double> a = bootstrap_exponents(c.cfg.spec, 0.0, 8);
  r["bootstrap_exponents"] = vector_json(a);
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
  static const std::map<std::string, std::function<void(Context&)>> r = {
      {"assemble", run_assemble},         {"solve", run_solve},
      {"eigen", run_eigen},               {"entropy-run", run_entropy},
      {"reaction-run", run_reaction},     {"harnack-suite", run_harnack},
      {"verify-inequalities", run_inequalities}, {"stampacchia", run_stampacchia}};
  return r;
}

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17e", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, fn] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto it = registry().find(cfg.experiment);
  if (it == registry().end()) {
    std::string list;
    for (const auto& n : experiment_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown experiment '" + cfg.experiment + "'; valid: " + list);
  }
  validate(cfg);
  ExperimentResult out;
  out.summary = json::object();
  out.summary["experiment"] = cfg.experiment;
  out.summary["config"] = json::object();
  for (const auto& [k, v] : cfg.resolved()) out.summary["config"][k] = v;
  out.summary["reports"] = json::object();
  out.summary["results"] = json::object();
  Context c{cfg, out};
  c.log("experiment " + cfg.experiment + ": " + cfg.spec.describe());
  it->second(c);
  out.summary["exit_code"] = out.exit_code;
  return out;
}

std::string format_json(const json& j) {
  std::string s;
  dump(j, s, 0);
  s += "\n";
  return s;
}

void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "summary.json", format_json(result.summary));
  for (const auto& [name, s] : result.series) write_text_file(dir / ("series_" + name + ".csv"), series_to_csv(s));
  std::ostringstream log;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  log << "# " << stamp << "\n";
  for (const auto& line : result.log) log << line << "\n";
  write_text_file(dir / "run.log", log.str());
}

}  // namespace wfpl::cli
