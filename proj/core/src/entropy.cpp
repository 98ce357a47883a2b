#include "wfpl/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wfpl/error.hpp"
#include "wfpl/nonlocal_op.hpp"

namespace wfpl {
namespace {

std::vector<double> default_k_lattice(double top) {
  std::vector<double> k;
  if (!(top > 0.0)) return {1.0};
  for (int j = 48; j >= 0; --j) k.push_back(top * std::pow(2.0, -j / 4.0));
  return k;
}

std::vector<double> default_h_lattice(double top) {
  std::vector<double> h;
  const double step = std::max(top, 1.0) / 16.0;
  for (int j = 1; j <= 20; ++j) h.push_back(j * step);
  return h;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

void EstimateConfig::validate(const ProblemSpec& spec) const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  for (const auto& [q, s1] : q_s1_pairs) {
    if (!(q > 0.0 && q < spec.besov_q_limit()))
      throw ConfigError("Besov pair needs 0 < q < N(p-1)/(N-s) = " + std::to_string(spec.besov_q_limit()));
    if (!(s1 > 0.0 && s1 < spec.s)) throw ConfigError("Besov pair needs 0 < s1 < s");
    if (!(q * s1 + 2.0 * spec.beta < spec.dim)) throw ConfigError("Besov pair needs q s1 + 2 beta < N");
  }
  for (double k : k_lattice)
    if (!(k > 0.0)) throw ConfigError("k_lattice entries must be positive");
  for (std::size_t i = 1; i < h_lattice.size(); ++i)
    if (!(h_lattice[i] > h_lattice[i - 1])) throw ConfigError("h_lattice must be increasing");
}

DiscreteFunction spike_data(const GridPtr& grid, double mass) {
  DiscreteFunction f = DiscreteFunction::zeros(grid);
  std::vector<std::size_t> hit;
  for (const Cell& c : grid->cells())
    if (c.lower == 0.0 || c.upper == 0.0) hit.push_back(c.index);
  if (hit.empty()) throw ContractError("spike_data: no cell touches the origin");
  for (std::size_t i : hit) f[i] = mass / (static_cast<double>(hit.size()) * grid->cell(i).dx_measure);
  return f;
}

double besov_seminorm(const DiscreteFunction& u, const KernelMatrix& B, double q) {
  require_grid(u, B.grid);
  const std::size_t n = u.size();
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) {
    const double* w = B.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::abs(u[i] - u[j]);
      if (d > 0.0) s.add(w[j] * std::pow(d, q));
    }
  }
  return 2.0 * s.value();
}

std::vector<double> entropy_tail(const DiscreteFunction& u, const KernelMatrix& K, const std::vector<double>& h_lattice) {
  require_grid(u, K.grid);
  const double p = K.grid->spec().p;
  const std::size_t n = u.size();
  std::vector<double> out;
  out.reserve(h_lattice.size());
  for (double h : h_lattice) {
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
      const double ai = std::abs(u[i]);
      const double* w = K.row(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double aj = std::abs(u[j]);
        const bool high = std::max(ai, aj) >= h + 1.0;
        const bool straddles = std::min(ai, aj) <= h || u[i] * u[j] < 0.0;
        if (high && straddles) s.add(w[j] * std::pow(std::abs(u[i] - u[j]), p - 1.0));
      }
      if (ai >= h + 1.0) s.add(K.tail_weights[i] * std::pow(ai, p - 1.0));
    }
    out.push_back(s.value());
  }
  return out;
}

LineFit fit_distribution_decay(const std::vector<double>& k, const std::vector<double>& phi, std::size_t* used) {
  double smallest = 0.0;
  for (double v : phi)
    if (v > 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (phi[i] > 0.0 && phi[i] >= 10.0 * smallest && phi[i] <= 0.1 * phi.front()) {
      x.push_back(std::log(k[i]));
      y.push_back(std::log(phi[i]));
    }
  }
  if (used) *used = x.size();
  if (x.size() < 2) return {};
  return fit_line(x, y);
}

SchemeTrace run_scheme(const DiscreteFunction& f, const std::vector<double>& levels, const KernelMatrix& K,
                       const EstimateConfig& cfg) {
  require_grid(f, K.grid);
  const ProblemSpec& spec = K.grid->spec();
  cfg.validate(spec);
  if (levels.empty()) throw ConfigError("run_scheme: no levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1])) throw ConfigError("run_scheme: levels must be increasing");
  for (double n : levels)
    if (!(n > 0.0)) throw ConfigError("run_scheme: levels must be positive");

  SchemeTrace tr;
  tr.levels = levels;
  tr.nonnegative_data = f.min() >= 0.0;
  std::optional<DiscreteFunction> start;
  for (double n : levels) {
    const DiscreteFunction fn = truncate(f, TruncationLevel(n));
    SolveOptions opt;
    opt.initial = start;
    SolveReport rep;
    try {
      rep = solve_dirichlet(fn, K, opt);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at level n = " + std::to_string(n), e.trace());
    }
    tr.data_l1.push_back(fn.l1_dx());
    tr.solver_iterations.push_back(rep.iterations);
    start = rep.solution;
    tr.solutions.push_back(std::move(rep.solution));
  }
  if (tr.nonnegative_data) {
    for (std::size_t l = 1; l < tr.solutions.size(); ++l)
      for (std::size_t i = 0; i < f.size(); ++i)
        tr.monotonicity_defect = std::max(tr.monotonicity_defect, tr.solutions[l - 1][i] - tr.solutions[l][i]);
  }

  const double top = tr.solutions.back().max_abs();
  tr.k_lattice = cfg.k_lattice.empty() ? default_k_lattice(top) : cfg.k_lattice;
  tr.h_lattice = cfg.h_lattice.empty() ? default_h_lattice(top) : cfg.h_lattice;
  const double p = spec.p;
  for (const auto& u : tr.solutions) {
    std::vector<double> row;
    for (double k : tr.k_lattice) row.push_back(energy_seminorm(truncate(u, TruncationLevel(k)), K, p));
    tr.truncation_energies.push_back(std::move(row));
    tr.entropy_tails.push_back(entropy_tail(u, K, tr.h_lattice));
  }
  for (double k : tr.k_lattice) tr.distribution.push_back(distribution_function(tr.solutions.back(), k));
  tr.marcinkiewicz_fit = fit_distribution_decay(tr.k_lattice, tr.distribution, &tr.fit_points);

  for (const auto& [q, s1] : cfg.q_s1_pairs) {
    KernelOptions ko;
    ko.order = q * s1;
    ko.with_tail = false;
    ko.quadrature_order = K.quadrature_order;
    const KernelMatrix B = assemble_kernel(K.grid, ko);
    BesovSeries bs{q, s1, {}};
    for (const auto& u : tr.solutions) bs.values.push_back(besov_seminorm(u, B, q));
    tr.besov.push_back(std::move(bs));
  }
  return tr;
}

EstimateReport truncation_energy_bound(const SchemeTrace& tr) {
  EstimateReport r;
  r.name = "truncation_energy_bound";
  double worst = 0.0;
  Series s{{"n", "k", "energy", "bound"}, {}};
  for (std::size_t l = 0; l < tr.levels.size(); ++l) {
    for (std::size_t j = 0; j < tr.k_lattice.size(); ++j) {
      const double k = tr.k_lattice[j];
      const double e = tr.truncation_energies[l][j];
      const double bound = 2.0 * k * tr.data_l1[l];
      s.add({tr.levels[l], k, e, bound});
      if (tr.data_l1[l] > 0.0) worst = std::max(worst, e / (k * tr.data_l1[l]));
      if (e > bound + 1e-8)
        r.violate("E(T_k u_n) = " + std::to_string(e) + " exceeds 2k||f_n||_1 = " + std::to_string(bound) +
                  " at n = " + std::to_string(tr.levels[l]) + ", k = " + std::to_string(k));
    }
  }
  r.values["worst_ratio"] = worst;
  r.series["truncation_energy"] = std::move(s);
  return r;
}

EstimateReport marcinkiewicz_estimate(const SchemeTrace& tr, const ProblemSpec& spec) {
  EstimateReport r;
  r.name = "marcinkiewicz";
  const double p1 = spec.marcinkiewicz_exponent();
  r.values["p1"] = p1;
  r.values["slope"] = tr.marcinkiewicz_fit.slope;
  r.values["intercept"] = tr.marcinkiewicz_fit.intercept;
  r.values["fit_points"] = static_cast<double>(tr.fit_points);
  Series s{{"k", "phi"}, {}};
  for (std::size_t j = 0; j < tr.k_lattice.size(); ++j) s.add({tr.k_lattice[j], tr.distribution[j]});
  r.series["distribution"] = std::move(s);
  if (tr.fit_points < 3) {
    r.inconclusive("fewer than 3 usable lattice points");
    return r;
  }
  if (tr.marcinkiewicz_fit.slope > -p1 + 0.5)
    r.violate("decay slope " + std::to_string(tr.marcinkiewicz_fit.slope) + " is shallower than -p1 + 0.5 = " +
              std::to_string(-p1 + 0.5));
  return r;
}

EstimateReport besov_estimate(const SchemeTrace& tr, const EstimateConfig& cfg, const ProblemSpec& spec) {
  cfg.validate(spec);
  EstimateReport r;
  r.name = "besov";
  Series s{{"n", "q", "s1", "value"}, {}};
  for (const auto& b : tr.besov) {
    for (std::size_t l = 0; l < b.values.size(); ++l) s.add({tr.levels[l], b.q, b.s1, b.values[l]});
    const double mx = *std::max_element(b.values.begin(), b.values.end());
    const double md = median(b.values);
    const std::string key = "q=" + std::to_string(b.q) + ",s1=" + std::to_string(b.s1);
    r.values["max[" + key + "]"] = mx;
    r.values["median[" + key + "]"] = md;
    // The proof of the estimate needs p q (s - s1)/(p - q) < beta; recorded, not required.
    r.values["proof_condition[" + key + "]"] = spec.p * b.q * (spec.s - b.s1) / (spec.p - b.q) < spec.beta ? 1.0 : 0.0;
    if (mx > 10.0 * md && mx > 0.0) r.violate("Besov seminorm grows across levels for " + key);
  }
  r.series["besov"] = std::move(s);
  return r;
}

EstimateReport entropy_tail_check(const SchemeTrace& tr, const DiscreteFunction& f, const KernelMatrix& K) {
  EstimateReport r;
  r.name = "entropy_tail";
  const double p = K.grid->spec().p;
  Series s{{"n", "h", "tail"}, {}};
  double worst_strip = 0.0;
  for (std::size_t l = 0; l < tr.solutions.size(); ++l) {
    const DiscreteFunction& u = tr.solutions[l];
    const double umax = u.max_abs();
    const auto& tail = tr.entropy_tails[l];
    double prev = -1.0;
    for (std::size_t j = 0; j < tr.h_lattice.size(); ++j) {
      const double h = tr.h_lattice[j];
      s.add({tr.levels[l], h, tail[j]});
      if (h > umax && tail[j] != 0.0)
        r.violate("tail nonzero above max|u| at n = " + std::to_string(tr.levels[l]) + ", h = " + std::to_string(h));
      if (h >= 0.5 * umax) {
        if (prev >= 0.0 && tail[j] > prev * (1.0 + 1e-12))
          r.violate("tail increases at n = " + std::to_string(tr.levels[l]) + ", h = " + std::to_string(h));
        prev = tail[j];
      }
    }

    // Level strips [h-k-1, h-1] against the data mass above h-k-1.
    const DiscreteFunction fn = truncate(f, TruncationLevel(tr.levels[l]));
    for (double h : tr.h_lattice) {
      for (double k : {0.25, 0.5, 1.0}) {
        const double lo = h - k - 1.0, hi = h - 1.0;
        CompensatedSum lhs, mass;
        for (std::size_t i = 0; i < u.size(); ++i) {
          if (u[i] > lo) mass.add(std::abs(fn[i]) * u.grid->cell(i).dx_measure);
          if (u[i] < lo || u[i] > hi) continue;
          const double* w = K.row(i);
          for (std::size_t m = i + 1; m < u.size(); ++m)
            if (u[m] >= lo && u[m] <= hi) lhs.add(w[m] * std::pow(std::abs(u[i] - u[m]), p));
        }
        const double bound = 2.0 * k * mass.value();
        if (bound > 0.0) worst_strip = std::max(worst_strip, lhs.value() / bound);
        if (lhs.value() > bound + 1e-8)
          r.violate("level-strip bound fails at h = " + std::to_string(h) + ", k = " + std::to_string(k));
      }
    }
  }
  r.values["worst_strip_ratio"] = worst_strip;
  r.series["entropy_tail"] = std::move(s);
  return r;
}

EstimateReport strong_Tk_convergence(const SchemeTrace& tr, const std::vector<double>& k_lattice, const KernelMatrix& K) {
  if (tr.solutions.size() < 3) throw ContractError("strong_Tk_convergence: need at least three levels");
  EstimateReport r;
  r.name = "strong_Tk_convergence";
  const double p = K.grid->spec().p;
  const DiscreteFunction& proxy = tr.solutions.back();
  Series s{{"k", "n", "distance"}, {}};
  double worst_final = 0.0;
  for (double k : k_lattice) {
    const TruncationLevel tk(k);
    const DiscreteFunction tproxy = truncate(proxy, tk);
    std::vector<double> d;
    for (std::size_t l = 0; l + 1 < tr.solutions.size(); ++l) {
      DiscreteFunction diff = truncate(tr.solutions[l], tk);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= tproxy[i];
      d.push_back(energy_seminorm(diff, K, p));
      s.add({k, tr.levels[l], d.back()});
    }
    for (std::size_t l = 1; l < d.size(); ++l)
      if (d[l] > 1.05 * d[l - 1] + 1e-14)
        r.violate("distance increases at k = " + std::to_string(k) + ", n = " + std::to_string(tr.levels[l]));
    if (d.front() > 0.0) {
      worst_final = std::max(worst_final, d.back() / d.front());
      if (d.back() >= 0.1 * d.front())
        r.violate("distance does not fall below 10% at k = " + std::to_string(k));
    }
  }
  r.values["worst_final_ratio"] = worst_final;
  r.series["strong_Tk"] = std::move(s);
  return r;
}

EstimateReport entropy_inequality_check(const DiscreteFunction& u, const DiscreteFunction& phi, double k,
                                        const KernelMatrix& K, const DiscreteFunction& f) {
  require_same_grid(u, phi);
  require_same_grid(u, f);
  require_grid(u, K.grid);
  const double p = K.grid->spec().p;
  DiscreteFunction test = u;
  for (std::size_t i = 0; i < u.size(); ++i) test[i] = truncate(u[i] - phi[i], k);
  const std::size_t n = u.size();
  CompensatedSum lhs, scale;
  for (std::size_t i = 0; i < n; ++i) {
    const double* w = K.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double term = w[j] * signed_power(u[i] - u[j], p) * (test[i] - test[j]);
      lhs.add(term);
      scale.add(std::abs(term));
    }
    const double term = K.tail_weights[i] * signed_power(u[i], p) * test[i];
    lhs.add(term);
    scale.add(std::abs(term));
  }
  const double rhs = pairing_dx(f, test);
  EstimateReport r;
  r.name = "entropy_inequality";
  r.values["lhs"] = lhs.value();
  r.values["rhs"] = rhs;
  r.values["gap"] = lhs.value() - rhs;
  const double tol = 1e-7 * (1.0 + scale.value() + std::abs(rhs));
  if (lhs.value() > rhs + tol) r.violate("entropy inequality fails by " + std::to_string(lhs.value() - rhs));
  return r;
}

}  // namespace wfpl
