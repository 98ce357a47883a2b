#include "wfpl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wfpl/error.hpp"
#include "wfpl/parallel.hpp"
#include "wfpl/quadrature.hpp"

namespace wfpl {
namespace {

constexpr int kMaxSeparatedDepth = 64;
constexpr int kMaxCornerDepth = 200;
constexpr double kCornerRelTol = 1e-11;
// Relative accuracy of a single pair integral with the default rules. The
// kernel tests check assembled weights against independent quadrature at this
// level, and the exterior-radius doubling test checks t_i against it.
constexpr double kQuadratureRelTol = 1e-9;

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// int_0^{e1} int_0^{e2} (x + y)^{-gamma} dy dx, the frozen-weight corner term.
double corner_closed_form(double e1, double e2, double gamma) {
  const double a = 2.0 - gamma;
  return (std::pow(e1 + e2, a) - std::pow(e1, a) - std::pow(e2, a)) / ((1.0 - gamma) * a);
}

class PairIntegrator {
 public:
  PairIntegrator(double gamma, double beta, int order)
      : gamma_(gamma), beta_(beta), rule_(gauss_legendre(order)) {
    if (beta > 0.0) {
      jacobi_left_ = &gauss_jacobi(order, 0.0, -beta);
      jacobi_right_ = &gauss_jacobi(order, -beta, 0.0);
    }
  }

  double integrate(Interval a, Interval b) const {
    if (a.lo > b.lo) std::swap(a, b);
    if (a.hi > b.lo) throw DomainError("pair_integral: intervals overlap");
    if (a.hi == b.lo) return corner(a, b);
    return separated(a, b, 0);
  }

  // |x|^{-beta} folded into the weights. Intervals ending at the origin use
  // Gauss-Jacobi rules for the endpoint singularity, so the rest of the
  // integrand stays analytic in the quadrature variable.
  void rule(Interval iv, Rule& out) const {
    const std::size_t n = rule_.nodes.size();
    out.x.resize(n);
    out.w.resize(n);
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double half = 0.5 * iv.length();
    const bool at_origin = iv.lo == 0.0 || iv.hi == 0.0;
    if (beta_ == 0.0 || !at_origin) {
      for (std::size_t k = 0; k < n; ++k) {
        out.x[k] = mid + half * rule_.nodes[k];
        out.w[k] = half * rule_.weights[k] * (beta_ == 0.0 ? 1.0 : std::pow(std::abs(out.x[k]), -beta_));
      }
      return;
    }
    const GaussRule& r = iv.lo == 0.0 ? *jacobi_left_ : *jacobi_right_;
    const double scale = std::pow(half, 1.0 - beta_);
    for (std::size_t k = 0; k < n; ++k) {
      out.x[k] = mid + half * r.nodes[k];
      out.w[k] = scale * r.weights[k];
    }
  }

  double separated(Interval a, Interval b, int depth) const {
    const double gap = b.lo - a.hi;
    const double size = std::max(a.length(), b.length());
    if (gap >= size) return tensor(a, b);
    if (depth >= kMaxSeparatedDepth)
      throw NumericalError("pair quadrature: subdivision depth exceeded", 0, 0);
    if (a.length() >= b.length()) {
      const double mid = 0.5 * (a.lo + a.hi);
      return separated({a.lo, mid}, b, depth + 1) + separated({mid, a.hi}, b, depth + 1);
    }
    const double mid = 0.5 * (b.lo + b.hi);
    return separated(a, {b.lo, mid}, depth + 1) + separated(a, {mid, b.hi}, depth + 1);
  }

  double tensor(Interval a, Interval b) const {
    Rule ra, rb;
    rule(a, ra);
    rule(b, rb);
    CompensatedSum acc;
    for (std::size_t k = 0; k < ra.x.size(); ++k) {
      CompensatedSum inner;
      for (std::size_t l = 0; l < rb.x.size(); ++l)
        inner.add(rb.w[l] * std::pow(std::abs(ra.x[k] - rb.x[l]), -gamma_));
      acc.add(ra.w[k] * inner.value());
    }
    return acc.value();
  }

  // a = [c - L1, c], b = [c, c + L2].
  double corner(Interval a, Interval b) const {
    const double c = a.hi;
    double e1 = a.length();
    double e2 = b.length();
    if (beta_ == 0.0) return corner_closed_form(e1, e2, gamma_);
    const bool homogeneous = c == 0.0;
    CompensatedSum total;
    for (int depth = 0; depth < kMaxCornerDepth; ++depth) {
      const Interval a_far{c - e1, c - 0.5 * e1};
      const Interval a_near{c - 0.5 * e1, c};
      const Interval b_near{c, c + 0.5 * e2};
      const Interval b_far{c + 0.5 * e2, c + e2};
      const double ring = separated(a_far, b_near, 0) + separated(a_near, b_far, 0) +
                          separated(a_far, b_far, 0);
      if (homogeneous) {
        // The integrand is homogeneous of degree -gamma - 2 beta about the
        // origin, so each halving scales the corner by 2^{-(2-gamma-2beta)}.
        const double ratio = std::pow(2.0, -(2.0 - gamma_ - 2.0 * beta_));
        return ring / (1.0 - ratio);
      }
      total.add(ring);
      e1 *= 0.5;
      e2 *= 0.5;
      const double remainder = std::pow(std::abs(c), -2.0 * beta_) * corner_closed_form(e1, e2, gamma_);
      const double freeze_error = remainder * beta_ * (e1 + e2) / std::abs(c);
      if (freeze_error <= kCornerRelTol * (std::abs(total.value()) + remainder)) {
        total.add(remainder);
        return total.value();
      }
    }
    throw NumericalError("pair quadrature: corner recursion did not converge", 0, 0);
  }

  double gamma() const { return gamma_; }
  double beta() const { return beta_; }

 private:
  double gamma_;
  double beta_;
  const GaussRule& rule_;
  const GaussRule* jacobi_left_ = nullptr;   // singular at t = -1
  const GaussRule* jacobi_right_ = nullptr;  // singular at t = +1
};

// Geometric partition of R_ext-ball minus Omega: widths h, 2h, 4h, ...
std::vector<Interval> exterior_partition(double radius, double outer, double first_width) {
  std::vector<Interval> right;
  double start = radius;
  double width = first_width;
  while (start < outer) {
    const double end = std::min(start + width, outer);
    right.push_back({start, end});
    start = end;
    width *= 2.0;
  }
  std::vector<Interval> all;
  all.reserve(2 * right.size());
  for (auto it = right.rbegin(); it != right.rend(); ++it) all.push_back({-it->hi, -it->lo});
  all.insert(all.end(), right.begin(), right.end());
  return all;
}

// Far field beyond R_ext for a point x with |x| <= R_ext/4:
//   F(x) = int_{|y|>R_ext} |x-y|^{-gamma} |y|^{-beta} dy
//        = sum_{k even} 2 (gamma)_k/k! x^k R_ext^{1-gamma-beta-k} / (gamma+beta+k-1).
struct FarField {
  double value;
  double remainder;  // bound on the omitted terms
};

FarField far_field(double x, double outer, double gamma, double beta) {
  const double z = x / outer;
  const double base = std::pow(outer, 1.0 - gamma - beta);
  CompensatedSum sum;
  double coeff = 1.0;  // (gamma)_k / k!
  double zk = 1.0;
  double last = 0.0;
  for (int k = 0; k < 400; ++k) {
    if (k % 2 == 0) {
      last = 2.0 * coeff * zk * base / (gamma + beta + k - 1.0);
      sum.add(last);
      if (std::abs(last) <= 1e-18 * std::abs(sum.value())) break;
    }
    coeff *= (gamma + k) / (k + 1.0);
    zk *= z;
  }
  // Ratio of successive even terms is below (gamma+k)(gamma+k+1)/((k+1)(k+2)) z^2 < 1.
  const double ratio = std::min(0.5, 4.0 * z * z);
  return {sum.value(), std::abs(last) * ratio / (1.0 - ratio)};
}

}  // namespace

double pair_integral(double a, double b, double c, double d, double gamma, double beta,
                     int quadrature_order) {
  if (!(a < b && c < d)) throw DomainError("pair_integral: empty interval");
  if ((a < 0.0 && b > 0.0) || (c < 0.0 && d > 0.0))
    throw DomainError("pair_integral: intervals must not straddle the origin");
  PairIntegrator integrator(gamma, beta, quadrature_order);
  return integrator.integrate({a, b}, {c, d});
}

KernelMatrix assemble_kernel(const GridPtr& grid, const KernelOptions& options) {
  if (!grid) throw ContractError("assemble_kernel: null grid");
  const ProblemSpec& spec = grid->spec();
  spec.validate();
  const double sigma = options.order < 0.0 ? spec.ps() : options.order;
  const double gamma = spec.dim + sigma;
  if (!(sigma > 0.0 && sigma + 2.0 * spec.beta < spec.dim))
    throw DomainError("kernel order must satisfy 0 < sigma and sigma + 2 beta < N");

  const std::size_t n = grid->size();
  KernelMatrix K;
  K.grid = grid;
  K.kernel_order = sigma;
  K.quadrature_order = options.quadrature_order;
  K.pair_weights.assign(n * n, 0.0);
  K.tail_weights.assign(n, 0.0);

  const PairIntegrator integrator(gamma, spec.beta, options.quadrature_order);
  auto cell_interval = [&](std::size_t i) { return Interval{grid->cell(i).lower, grid->cell(i).upper}; };

  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double w = 0.0;
      try {
        w = integrator.integrate(cell_interval(i), cell_interval(j));
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " for cell pair (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ")",
                             i, j);
      }
      if (!(std::isfinite(w) && w >= 0.0))
        throw NumericalError("non-finite pair weight for cell pair (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ")",
                             i, j);
      K.pair_weights[i * n + j] = w;
      K.pair_weights[j * n + i] = w;
    }
  });

  if (options.with_tail) {
    const double width = grid->cell(0).dx_measure;
    const auto exterior = exterior_partition(spec.domain_radius, spec.exterior_radius, width);
    std::vector<double> relative_remainder(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
      const Interval cell = cell_interval(i);
      CompensatedSum t;
      for (const auto& e : exterior) {
        try {
          t.add(integrator.integrate(cell, e));
        } catch (const NumericalError& err) {
          throw NumericalError(std::string(err.what()) + " for tail of cell " + std::to_string(i), i, i);
        }
      }
      Rule r;
      integrator.rule(cell, r);
      CompensatedSum far;
      double remainder = 0.0;
      for (std::size_t k = 0; k < r.x.size(); ++k) {
        const FarField ff = far_field(r.x[k], spec.exterior_radius, gamma, spec.beta);
        far.add(r.w[k] * ff.value);
        remainder += r.w[k] * ff.remainder;
      }
      t.add(far.value());
      K.tail_weights[i] = t.value();
      relative_remainder[i] = remainder / t.value();
      if (!(std::isfinite(K.tail_weights[i]) && K.tail_weights[i] > 0.0))
        throw NumericalError("non-finite tail weight for cell " + std::to_string(i), i, i);
    });
    K.truncation_error_bound =
        kQuadratureRelTol + *std::max_element(relative_remainder.begin(), relative_remainder.end());
  }
  return K;
}

double exterior_interaction(double x, const ProblemSpec& spec) {
  if (spec.dim != 1) throw DomainError("exterior_interaction: closed form is one-dimensional");
  const double radius = spec.domain_radius;
  if (!(std::abs(x) < radius)) throw DomainError("exterior_interaction: x must lie inside Omega");
  const double ps = spec.ps();
  return (std::pow(radius - x, -ps) + std::pow(radius + x, -ps)) / ps;
}

double tail_supremum(const Grid& grid, double support_radius) {
  const ProblemSpec& spec = grid.spec();
  if (!(support_radius > 0.0 && support_radius < spec.domain_radius))
    throw DomainError("tail_supremum: support radius must lie in (0, domain_radius)");
  const auto inside = grid.ball(support_radius);
  double best = exterior_interaction(0.0, spec);
  for (std::size_t i : inside) best = std::max(best, exterior_interaction(grid.cell(i).center, spec));
  return best;
}

}  // namespace wfpl
