#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "wfpl/kernel.hpp"
#include "wfpl/discrete_function.hpp"

namespace wfpl::test {

inline ProblemSpec spec(double p, double s, double beta) {
  ProblemSpec sp;
  sp.p = p;
  sp.s = s;
  sp.beta = beta;
  return sp;
}

// (p, s, beta) triples used across the suites.
inline std::vector<ProblemSpec> golden_specs() {
  return {spec(2.0, 0.4, 0.05), spec(1.5, 0.4, 0.1), spec(3.0, 0.25, 0.05)};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Two cells (-1,0), (0,1) with unit measures and hand-set coefficients.
inline KernelMatrix two_cell_kernel(double w12, double t1, double t2) {
  auto grid = make_grid(spec(2.0, 0.4, 0.0), 2);
  KernelMatrix K;
  K.grid = grid;
  K.kernel_order = 0.8;
  K.pair_weights = {0.0, w12, w12, 0.0};
  K.tail_weights = {t1, t2};
  return K;
}

// p = 2 stiffness S = diag(sum_j w_ij + t_i) - w.
inline Eigen::MatrixXd stiffness(const KernelMatrix& K) {
  const auto n = static_cast<Eigen::Index>(K.size());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = K.tail_weights[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = K.weight(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      S(i, j) = -w;
      diag += w;
    }
    S(i, i) = diag;
  }
  return S;
}

}  // namespace wfpl::test
