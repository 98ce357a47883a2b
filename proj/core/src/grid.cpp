#include "wfpl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "wfpl/error.hpp"
#include "wfpl/quadrature.hpp"

namespace wfpl {

double weighted_length(double a, double b, double exponent) {
  if (exponent == 0.0) return b - a;
  if (!(exponent < 1.0)) throw DomainError("weighted_length: exponent must be < 1 for integrability");
  const double e = 1.0 - exponent;
  auto primitive = [e](double x) { return std::copysign(std::pow(std::abs(x), e) / e, x); };
  return primitive(b) - primitive(a);
}

Grid::Grid(ProblemSpec spec, std::vector<Cell> cells) : spec_(spec), cells_(std::move(cells)) {
  if (cells_.empty()) throw ConfigError("grid must contain at least one cell");
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    if (c.index != i) throw ConfigError("cell indices must be 0..n-1 in order");
    if (!(c.halfwidth > 0.0 && c.dx_measure > 0.0 && c.mu_measure > 0.0))
      throw ConfigError("cell measures must be positive");
    if (i > 0 && cells_[i - 1].upper > c.lower) throw ConfigError("cells must be ordered and disjoint");
    if (c.lower < 0.0 && c.upper > 0.0) throw ConfigError("no cell may straddle the origin");
  }
  by_radius_.resize(cells_.size());
  std::iota(by_radius_.begin(), by_radius_.end(), std::size_t{0});
  std::stable_sort(by_radius_.begin(), by_radius_.end(), [this](std::size_t l, std::size_t r) {
    return std::abs(cells_[l].center) < std::abs(cells_[r].center);
  });
  radii_.reserve(cells_.size());
  mu_prefix_.assign(1, 0.0);
  CompensatedSum acc;
  for (std::size_t idx : by_radius_) {
    radii_.push_back(std::abs(cells_[idx].center));
    acc.add(cells_[idx].mu_measure);
    mu_prefix_.push_back(acc.value());
  }
}

void Grid::check_radius(double r) const {
  if (!(r > 0.0 && r <= spec_.domain_radius))
    throw DomainError("ball radius must satisfy 0 < r <= domain_radius");
}

std::size_t Grid::count_within(double r) const {
  return static_cast<std::size_t>(std::lower_bound(radii_.begin(), radii_.end(), r) - radii_.begin());
}

std::vector<std::size_t> Grid::ball(double r) const {
  check_radius(r);
  const std::size_t m = count_within(r);
  std::vector<std::size_t> out(by_radius_.begin(), by_radius_.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(out.begin(), out.end());
  return out;
}

double Grid::weighted_ball_measure(double r) const {
  check_radius(r);
  return mu_prefix_[count_within(r)];
}

double Grid::total_dx_measure() const {
  CompensatedSum acc;
  for (const auto& c : cells_) acc.add(c.dx_measure);
  return acc.value();
}

double Grid::total_mu_measure() const { return mu_prefix_.back(); }

Grid build_grid(const ProblemSpec& spec, std::size_t n_cells) {
  spec.validate();
  if (n_cells < 2) throw ConfigError("n_cells must be at least 2");
  if (n_cells % 2 != 0) throw ConfigError("n_cells must be even");
  if (spec.dim != 1) throw ConfigError("only N = 1 grids are implemented");
  const double radius = spec.domain_radius;
  const auto n = static_cast<long long>(n_cells);
  // Integer numerators keep the origin and the mirror symmetry exact.
  auto node = [&](long long i) { return radius * static_cast<double>(2 * i - n) / static_cast<double>(n); };
  std::vector<Cell> cells(n_cells);
  for (long long i = 0; i < n; ++i) {
    Cell& c = cells[static_cast<std::size_t>(i)];
    c.index = static_cast<std::size_t>(i);
    c.lower = node(i);
    c.upper = node(i + 1);
    c.center = 0.5 * (c.lower + c.upper);
    c.halfwidth = 0.5 * (c.upper - c.lower);
    c.dx_measure = c.upper - c.lower;
    c.mu_measure = weighted_length(c.lower, c.upper, 2.0 * spec.beta);
  }
  return Grid(spec, std::move(cells));
}

Grid build_graded_grid(const ProblemSpec& spec, std::size_t n_cells, double grading) {
  if (!(grading >= 1.0)) throw ConfigError("grading exponent must be at least 1");
  if (grading == 1.0) return build_grid(spec, n_cells);
  spec.validate();
  if (n_cells < 2) throw ConfigError("n_cells must be at least 2");
  if (n_cells % 2 != 0) throw ConfigError("n_cells must be even");
  if (spec.dim != 1) throw ConfigError("only N = 1 grids are implemented");
  const double radius = spec.domain_radius;
  const auto n = static_cast<long long>(n_cells);
  auto node = [&](long long i) {
    const double t = static_cast<double>(2 * i - n) / static_cast<double>(n);
    return radius * std::copysign(std::pow(std::abs(t), grading), t);
  };
  std::vector<Cell> cells(n_cells);
  for (long long i = 0; i < n; ++i) {
    Cell& c = cells[static_cast<std::size_t>(i)];
    c.index = static_cast<std::size_t>(i);
    c.lower = node(i);
    c.upper = node(i + 1);
    c.center = 0.5 * (c.lower + c.upper);
    c.halfwidth = 0.5 * (c.upper - c.lower);
    c.dx_measure = c.upper - c.lower;
    c.mu_measure = weighted_length(c.lower, c.upper, 2.0 * spec.beta);
  }
  return Grid(spec, std::move(cells));
}

GridPtr make_grid(const ProblemSpec& spec, std::size_t n_cells) {
  return std::make_shared<const Grid>(build_grid(spec, n_cells));
}

std::string grid_to_text(const Grid& grid) {
  std::string out;
  char line[160];
  for (const auto& c : grid.cells()) {
    std::snprintf(line, sizeof line, "%zu %.17e %.17e %.17e %.17e\n", c.index, c.center, c.halfwidth,
                  c.dx_measure, c.mu_measure);
    out += line;
  }
  return out;
}

Grid grid_from_text(const ProblemSpec& spec, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<Cell> cells;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Cell c;
    if (!(ls >> c.index >> c.center >> c.halfwidth >> c.dx_measure >> c.mu_measure))
      throw ConfigError("malformed grid line: " + line);
    c.lower = c.center - c.halfwidth;
    c.upper = c.center + c.halfwidth;
    // Faces at the origin must stay exactly at zero for the weight rules.
    if (std::abs(c.lower) < 1e-12 * c.halfwidth) c.lower = 0.0;
    if (std::abs(c.upper) < 1e-12 * c.halfwidth) c.upper = 0.0;
    cells.push_back(c);
  }
  return Grid(spec, std::move(cells));
}

}  // namespace wfpl
