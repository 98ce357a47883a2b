#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wfpl/grid.hpp"

namespace wfpl {

/// Cell values of a piecewise-constant function on a grid.
struct DiscreteFunction {
  GridPtr grid;
  std::vector<double> values;

  DiscreteFunction() = default;
  DiscreteFunction(GridPtr g, std::vector<double> v);

  static DiscreteFunction zeros(const GridPtr& g);
  static DiscreteFunction constant(const GridPtr& g, double c);
  /// Samples fn at the cell centers.
  static DiscreteFunction sample(const GridPtr& g, const std::function<double(double)>& fn);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double max_abs() const;
  double min() const;
  double max() const;
  /// sum |f_i| dx_i
  double l1_dx() const;
};

/// Throws ContractError unless both live on the same grid object.
void require_same_grid(const DiscreteFunction& a, const DiscreteFunction& b);
void require_grid(const DiscreteFunction& u, const GridPtr& grid);

/// Rows "index,center,value" after a header line.
std::string to_csv(const DiscreteFunction& u);
DiscreteFunction from_csv(const GridPtr& grid, std::string_view text);

}  // namespace wfpl
