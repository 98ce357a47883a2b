// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wfpl/entropy.hpp"
#include "wfpl/harnack.hpp"
#include "wfpl/nonlocal_op.hpp"
#include "wfpl/reaction.hpp"
#include "wfpl/solver.hpp"
#include "wfpl/special_functions.hpp"

using namespace wfpl;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

ProblemSpec make_spec(double p, double s, double beta) {
  ProblemSpec sp;
  sp.p = p;
  sp.s = s;
  sp.beta = beta;
  return sp;
}

std::vector<ProblemSpec> golden() {
  return {make_spec(2.0, 0.4, 0.05), make_spec(1.5, 0.4, 0.1), make_spec(3.0, 0.25, 0.05)};
}

std::string label(const ProblemSpec& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(p=%g s=%g beta=%g)", s.p, s.s, s.beta);
  return buf;
}

DiscreteFunction random_function(const GridPtr& g, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  DiscreteFunction u = DiscreteFunction::zeros(g);
  for (double& x : u.values) x = d(rng);
  return u;
}

Eigen::MatrixXd stiffness(const KernelMatrix& K) {
  const auto n = static_cast<Eigen::Index>(K.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S(i, i) = K.tail_weights[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = K.weight(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      S(i, j) = -w;
      S(i, i) += w;
    }
  }
  return S;
}

SolveOptions tight(const DiscreteFunction& f) {
  SolveOptions o;
  o.tol = 1e-2 * default_tolerance(f);
  return o;
}

const std::vector<double> kLevels = {1, 2, 4, 8, 16, 32, 64};

// Scheme runs shared by criteria 4, 6 and 7.
struct SchemeRun {
  ProblemSpec spec;
  std::shared_ptr<KernelMatrix> K;
  DiscreteFunction f;
  SchemeTrace trace;
};

std::vector<SchemeRun>& scheme_runs() {
  static std::vector<SchemeRun> runs = [] {
    std::vector<SchemeRun> out;
    for (const ProblemSpec& s : golden()) {
      SchemeRun r;
      r.spec = s;
      r.K = std::make_shared<KernelMatrix>(assemble_kernel(make_grid(s, 128)));
      r.f = spike_data(r.K->grid);
      r.trace = run_scheme(r.f, kLevels, *r.K);
      out.push_back(std::move(r));
    }
    return out;
  }();
  return runs;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "[exception: " << e.what() << "] ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.pass = false;
    o.detail << "[over time budget " << budget_s << " s] ";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s(%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "gradient consistency", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (const ProblemSpec& s : golden()) {
      const KernelMatrix K = assemble_kernel(make_grid(s, 32));
      for (int t = 0; t < 100; ++t) {
        const DiscreteFunction u = random_function(K.grid, rng, -1.0, 1.0);
        const DiscreteFunction v = random_function(K.grid, rng, -1.0, 1.0);
        const double h = 1e-6;
        DiscreteFunction up = u, um = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
          up[i] += h * v[i];
          um[i] -= h * v[i];
        }
        const double fd = (energy_seminorm(up, K, s.p) - energy_seminorm(um, K, s.p)) / (2.0 * h * s.p);
        const double an = pairing_mu(apply_operator(u, K, s.p), v);
        worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
      }
    }
    o.detail << "300 pairs, worst relative error " << worst << " ";
    o.require(worst < 1e-5, "relative error >= 1e-5");
  });

  criterion(2, "p=2 dense oracle", 5.0, [](Outcome& o) {
    std::mt19937_64 rng(102);
    double worst = 0.0;
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
      const KernelMatrix K = assemble_kernel(make_grid(make_spec(2.0, 0.4, 0.05), n));
      const DiscreteFunction f = random_function(K.grid, rng, -1.0, 1.0);
      Eigen::VectorXd b(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) b(static_cast<Eigen::Index>(i)) = f[i] * K.grid->cell(i).dx_measure;
      const Eigen::VectorXd x = stiffness(K).ldlt().solve(b);
      const DiscreteFunction u = solve_dirichlet(f, K, tight(f)).solution;
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(u[i] - x(static_cast<Eigen::Index>(i))));
      worst = std::max(worst, err / (1.0 + x.lpNorm<Eigen::Infinity>()));
    }
    o.detail << "n = 8..64, worst scaled max error " << worst << " ";
    o.require(worst <= 1e-10, "error > 1e-10");
  });

  criterion(3, "comparison principle", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(103);
    for (const ProblemSpec& s : golden()) {
      const KernelMatrix K = assemble_kernel(make_grid(s, 32));
      double worst = -1e300;
      for (int t = 0; t < 50; ++t) {
        const DiscreteFunction f1 = random_function(K.grid, rng, 0.0, 1.0);
        DiscreteFunction f2 = f1;
        std::uniform_real_distribution<double> extra(0.0, 1.0);
        for (double& x : f2.values) x += extra(rng);
        const EstimateReport r = comparison_check(f1, f2, K);
        worst = std::max(worst, r.values.at("max_difference"));
        o.require(r.passed(), "u1 > u2 + 1e-8 at " + label(s));
      }
      o.detail << "p=" << s.p << " max(u1-u2) " << worst << "; ";
    }
  });

  criterion(4, "truncation energy bound", 60.0, [](Outcome& o) {
    for (const SchemeRun& r : scheme_runs()) {
      const EstimateReport b = truncation_energy_bound(r.trace);
      o.detail << "p=" << r.spec.p << " worst ratio " << b.values.at("worst_ratio") << "; ";
      o.require(b.passed(), label(r.spec));
    }
  });

  criterion(5, "Marcinkiewicz exponent", 120.0, [](Outcome& o) {
    const ProblemSpec s = make_spec(2.0, 0.4, 0.05);
    const double p1 = s.marcinkiewicz_exponent();
    o.require(std::abs(p1 - 5.0) < 1e-12, "p1 != 5");
    {
      const GridPtr g = std::make_shared<const Grid>(build_graded_grid(s, 256, 4.0));
      const KernelMatrix K = assemble_kernel(g);
      const SchemeTrace tr = run_scheme(spike_data(g), kLevels, K);
      const EstimateReport m = marcinkiewicz_estimate(tr, s);
      o.detail << "p1 = " << p1 << ", graded n=256: slope " << tr.marcinkiewicz_fit.slope << " over "
               << tr.fit_points << " points (" << to_string(m.status) << "); ";
      o.require(m.passed(), "graded-grid slope shallower than -p1 + 0.5");
    }
    {
      const KernelMatrix K = assemble_kernel(make_grid(s, 256));
      const SchemeTrace tr = run_scheme(spike_data(K.grid), kLevels, K);
      const EstimateReport m = marcinkiewicz_estimate(tr, s);
      o.detail << "uniform n=256 (not gating): slope " << tr.marcinkiewicz_fit.slope << " over " << tr.fit_points
               << " points (" << to_string(m.status) << ") ";
    }
  });

  criterion(6, "entropy tail", 0.0, [](Outcome& o) {
    for (const SchemeRun& r : scheme_runs()) {
      const EstimateReport e = entropy_tail_check(r.trace, r.f, *r.K);
      o.require(e.passed(), label(r.spec) + " " + e.message);
      const double top = r.trace.solutions.back().max_abs();
      const auto above = entropy_tail(r.trace.solutions.back(), *r.K, {1.0001 * top, 2.0 * top});
      o.require(above[0] == 0.0 && above[1] == 0.0, "tail nonzero above max u");
    }
    o.detail << scheme_runs().size() << " scheme runs, tails vanish above max u ";
  });

  criterion(7, "strong T_k convergence", 0.0, [](Outcome& o) {
    for (const SchemeRun& r : scheme_runs()) {
      SchemeTrace tr = r.trace;
      // levels 2 -> 64
      tr.levels.erase(tr.levels.begin());
      tr.solutions.erase(tr.solutions.begin());
      const double top = tr.solutions.back().max_abs();
      const EstimateReport c = strong_Tk_convergence(tr, {0.1 * top, 0.5 * top, top}, *r.K);
      // d(n)/d(2) at the last level whose solution still differs from the proxy.
      double before_proxy = 0.0;
      const Series& d = c.series.at("strong_Tk");
      for (const auto& first : d.rows) {
        if (first[1] != 2.0 || first[2] <= 0.0) continue;
        double last_n = 0.0, last_d = 0.0;
        for (const auto& row : d.rows)
          if (row[0] == first[0] && row[2] > 0.0 && row[1] > last_n) last_n = row[1], last_d = row[2];
        before_proxy = std::max(before_proxy, last_d / first[2]);
      }
      o.detail << "p=" << r.spec.p << " final/initial " << c.values.at("worst_final_ratio")
               << " (last nonzero level " << before_proxy << "); ";
      o.require(c.passed(), label(r.spec) + " " + c.message);
    }
  });

  criterion(8, "Picone", 0.0, [](Outcome& o) {
    std::mt19937_64 rng(108);
    int violations = 0, trials = 0;
    double worst_equality = 0.0;
    std::vector<KernelMatrix> kernels;
    for (const ProblemSpec& s : golden()) kernels.push_back(assemble_kernel(make_grid(s, 16)));
    for (int t = 0; t < 500; ++t) {
      const KernelMatrix& K = kernels[static_cast<std::size_t>(t) % kernels.size()];
      const double p = K.grid->spec().p;
      const DiscreteFunction f = random_function(K.grid, rng, 0.5, 1.5);
      const DiscreteFunction w = solve_dirichlet(f, K).solution;
      const DiscreteFunction v = random_function(K.grid, rng, -1.0, 1.0);
      ++trials;
      if (!picone_check(w, v, K, p).passed()) ++violations;
      const EstimateReport eq = picone_check(w, w, K, p);
      worst_equality = std::max(worst_equality, std::abs(eq.values.at("gap")) / (1.0 + eq.values.at("lhs")));
    }
    o.detail << trials << " trials, " << violations << " violations, worst relative gap at v=w " << worst_equality
             << " ";
    o.require(violations == 0, "Picone violated");
    o.require(worst_equality <= 1e-9, "equality at v=w off by more than 1e-9");
  });

  criterion(9, "eigenvalue dichotomy", 0.0, [](Outcome& o) {
    for (const ProblemSpec& s : golden()) {
      const KernelMatrix K = assemble_kernel(make_grid(s, 64));
      const double l1 = first_eigenvalue(K).lambda1;
      const DiscreteFunction g = spike_data(K.grid);
      const ReactionOutcome below = monotone_iterate(g, 0.5 * l1, s.p - 1.0, K);
      const ReactionOutcome above = monotone_iterate(g, 1.5 * l1, s.p - 1.0, K);
      o.detail << "p=" << s.p << " lambda1 " << l1 << " " << to_string(below.status) << "/" << to_string(above.status)
               << "; ";
      o.require(below.status == ReactionStatus::converged, label(s) + " no convergence at 0.5 lambda1");
      o.require(above.status == ReactionStatus::diverged, label(s) + " no divergence at 1.5 lambda1");
    }
    const KernelMatrix K = assemble_kernel(make_grid(make_spec(2.0, 0.4, 0.05), 32));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(32, 32);
    for (std::size_t i = 0; i < 32; ++i)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = K.grid->cell(i).dx_measure;
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(stiffness(K), M);
    const double ref = es.eigenvalues()(0);
    const double rel = std::abs(first_eigenvalue(K).lambda1 - ref) / ref;
    o.detail << "dense oracle relative error " << rel << " ";
    o.require(rel < 1e-6, "lambda1 off the dense oracle");
  });

  criterion(10, "superlinear regime", 0.0, [](Outcome& o) {
    o.require(superlinear_lambda_bar(2.0, 2.0) == 0.25, "lambda_bar(2, 2) != 0.25");
    for (const ProblemSpec& s : golden()) {
      const KernelMatrix K = assemble_kernel(make_grid(s, 64));
      const double q = std::max(2.0, s.p);
      const DiscreteFunction g = admissible_constant_data(K, q);
      const DiscreteFunction w = solve_dirichlet(g, K, tight(g)).solution;
      const RegimeReport regime = regime_classify(superlinear_lambda_bar(q, s.p), q, s, 0.0, g, w);
      o.require(regime.regime == Regime::superlinear_ok, label(s) + " data not admissible");
      const EstimateReport sup = supersolution_check(g, q, K);
      const double excess = sup.values.at("max_v_minus_factor_w");
      o.detail << "p=" << s.p << " q=" << q << ": max(v - 2^{p-1} w) " << excess << ", max(v - 2^{1/(p-1)} w) "
               << sup.values.at("max_v_minus_homogeneity_w") << ", residual deficit "
               << sup.values.at("max_supersolution_deficit");
      o.require(sup.values.at("max_supersolution_deficit") <= 1e-7, label(s) + " supersolution residual");
      o.require(sup.values.at("max_v_minus_homogeneity_w") <= 1e-7, label(s) + " v above 2^{1/(p-1)} w");
      if (s.p >= 2.0)
        o.require(excess <= 1e-7, label(s) + " v above 2^{p-1} w");
      else if (excess > 1e-7)
        o.detail << " (2^{p-1} bound not implied for p < 2, not gating)";
      const double lb = superlinear_lambda_bar(q, s.p);
      for (double lambda : {0.5 * lb, lb}) {
        const ReactionOutcome r = monotone_iterate(g, lambda, q, K);
        o.require(r.status == ReactionStatus::converged, label(s) + " iteration below lambda_bar");
      }
      o.detail << "; ";
    }
  });

  criterion(11, "Stampacchia", 0.0, [](Outcome& o) {
    ProblemSpec two = make_spec(2.0, 0.5, 0.0);
    two.dim = 2;
    const double gamma = stampacchia_gamma(two, 3.0);
    o.detail << "gamma(N=2,p=2,s=0.5,m=3) = " << gamma << "; ";
    o.require(std::abs(gamma - 5.0 / 3.0) <= 1e-15, "gamma != 5/3");
    std::mt19937_64 rng(111);
    int runs = 0;
    for (const ProblemSpec& s : golden()) {
      const KernelMatrix K = assemble_kernel(make_grid(s, 64));
      const double m = 2.0 * s.dim / s.ps();
      for (const DiscreteFunction& f :
           {DiscreteFunction::constant(K.grid, 1.0), random_function(K.grid, rng, 0.0, 2.0),
            random_function(K.grid, rng, -1.0, 1.0)}) {
        const LevelSetTrace t = stampacchia_bound(f, m, K);
        ++runs;
        o.require(t.status == Status::passed && t.zero_level.has_value(), label(s) + " " + t.message);
      }
    }
    o.detail << runs << " bounded-data runs reach Phi = 0 ";
  });

  criterion(12, "weak Harnack suite", 300.0, [](Outcome& o) {
    for (const ProblemSpec& s : golden()) {
      const HarnackSuiteResult r = run_harnack_suite(s);
      double spread = 1.0, defect = 0.0;
      for (const auto& [k, v] : r.summary.values) {
        if (k.rfind("spread_", 0) == 0) spread = std::max(spread, v);
        if (k.rfind("scale_defect_", 0) == 0) defect = std::max(defect, v);
      }
      o.detail << "p=" << s.p << " " << r.constants.size() << " constants, max spread " << spread
               << ", max scale defect " << defect << "; ";
      o.require(r.summary.passed(), label(s) + " " + r.summary.message);
    }
  });

  criterion(13, "kernel asymptotics", 0.0, [](Outcome& o) {
    double worst = 0.0;
    for (int N : {1, 2, 3})
      for (double theta : {0.3, 0.6})
        for (double beta : {0.0, 0.05, 0.1}) {
          const KernelAsymptotics a = fit_kernel_asymptotics(N, theta, beta);
          const double e1 = std::abs(a.near_one.slope - (-1.0 + theta));
          const double e2 = std::abs(a.at_infinity.slope - (-1.0 - beta + theta));
          worst = std::max({worst, e1, e2});
        }
    o.detail << "N=1..3, worst exponent deviation " << worst << " ";
    o.require(worst <= 0.05, "deviation > 0.05");
  });

  std::printf("%s: %d of 13 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
