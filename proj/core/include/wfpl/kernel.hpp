#pragma once

#include <cstddef>
#include <vector>

#include "wfpl/grid.hpp"

namespace wfpl {

/// Discrete coefficients of d nu = dx dy / (|x-y|^{N+sigma} |x|^beta |y|^beta)
/// on a piecewise-constant space:
///   w_ij = int_{C_i} int_{C_j} d nu          (i != j, w_ii = 0)
///   t_i  = int_{C_i} int_{R^N \ Omega} d nu  (exterior Dirichlet tail)
/// For the operator itself sigma = p s.
struct KernelMatrix {
  GridPtr grid;
  double kernel_order = 0.0;  // sigma
  int quadrature_order = 0;
  double truncation_error_bound = 0.0;  // estimated relative error of t_i
  std::vector<double> pair_weights;     // row-major n x n, symmetric
  std::vector<double> tail_weights;     // n, zero when assembled without tail

  std::size_t size() const { return tail_weights.size(); }
  double weight(std::size_t i, std::size_t j) const { return pair_weights[i * size() + j]; }
  const double* row(std::size_t i) const { return pair_weights.data() + i * size(); }
};

struct KernelOptions {
  int quadrature_order = 10;
  /// Kernel exponent sigma; negative selects p s from the grid's spec.
  double order = -1.0;
  bool with_tail = true;
};

/// Assembles w and t. Separated cell pairs use tensor Gauss-Legendre rules
/// (subdividing until the gap is at least the piece size); touching pairs
/// recurse dyadically toward the shared face. Tails integrate a geometric
/// partition of (R, R_ext) plus a convergent power series beyond R_ext.
/// Throws NumericalError naming the pair when the recursion does not settle.
KernelMatrix assemble_kernel(const GridPtr& grid, const KernelOptions& options = {});

/// int_a^b int_c^d |x-y|^{-gamma} |x|^{-beta} |y|^{-beta} dy dx for disjoint
/// (possibly touching) intervals that do not straddle the origin.
double pair_integral(double a, double b, double c, double d, double gamma, double beta,
                     int quadrature_order = 10);

/// int_{|y| > R} |x-y|^{-1-ps} dy in one dimension (closed form).
double exterior_interaction(double x, const ProblemSpec& spec);

/// sup over cells with center in B_{support_radius} of exterior_interaction.
/// Falls back to x = 0 when no center lies in the ball.
double tail_supremum(const Grid& grid, double support_radius);

}  // namespace wfpl
