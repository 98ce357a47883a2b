#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace wfpl {

/// Neumaier-compensated accumulator. Summation order is the call order, so
/// results are reproducible bit for bit.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with `order` points (cached, thread safe).
const GaussRule& gauss_legendre(int order);

/// Gauss-Jacobi rule for the weight (1-t)^a (1+t)^b on [-1, 1] (cached).
const GaussRule& gauss_jacobi(int order, double a, double b);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b]. Bisects the
/// interval with the largest error estimate until the total estimate drops
/// below max(abs_tol, rel_tol |I|) or max_intervals is reached.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol = 0.0, int max_intervals = 4000);

/// Least-squares line through (x_i, y_i).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace wfpl
