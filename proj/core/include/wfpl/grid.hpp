#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfpl/problem.hpp"

namespace wfpl {

/// One cell [lower, upper] of the decomposition of Omega = (-R, R).
struct Cell {
  std::size_t index = 0;
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
  double halfwidth = 0.0;
  double dx_measure = 0.0;  // Lebesgue length
  double mu_measure = 0.0;  // integral of |x|^{-2 beta} over the cell
};

/// Closed-form integral of |x|^{-exponent} over [a, b] (exponent < 1).
double weighted_length(double a, double b, double exponent);

/// Uniform cell-centered decomposition of Omega with exact weighted measures.
/// Immutable after construction.
class Grid {
 public:
  /// Validates ordering, disjointness and positivity of the supplied cells.
  Grid(ProblemSpec spec, std::vector<Cell> cells);

  const ProblemSpec& spec() const { return spec_; }
  std::span<const Cell> cells() const { return cells_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  std::size_t size() const { return cells_.size(); }

  /// Indices (ascending) of the cells whose center lies in the open ball B_r.
  /// Requires 0 < r <= domain_radius.
  std::vector<std::size_t> ball(double r) const;
  /// Sum of mu_measure over ball(r); nondecreasing in r.
  double weighted_ball_measure(double r) const;

  double total_dx_measure() const;
  double total_mu_measure() const;

 private:
  std::size_t count_within(double r) const;
  void check_radius(double r) const;

  ProblemSpec spec_;
  std::vector<Cell> cells_;
  // Cells sorted by |center| with running mu sums: B_r is a prefix.
  std::vector<std::size_t> by_radius_;
  std::vector<double> radii_;
  std::vector<double> mu_prefix_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid with an even number of cells so the origin sits on a face.
Grid build_grid(const ProblemSpec& spec, std::size_t n_cells);
GridPtr make_grid(const ProblemSpec& spec, std::size_t n_cells);

/// Power-graded grid with faces R sign(t)|t|^grading, t = (2i - n)/n, which
/// concentrates cells at the origin. grading = 1 is build_grid.
Grid build_graded_grid(const ProblemSpec& spec, std::size_t n_cells, double grading);

/// One cell per line: index center halfwidth dx_measure mu_measure.
std::string grid_to_text(const Grid& grid);
Grid grid_from_text(const ProblemSpec& spec, std::string_view text);

}  // namespace wfpl
