#include "wfpl/discrete_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wfpl/error.hpp"
#include "wfpl/quadrature.hpp"

namespace wfpl {

DiscreteFunction::DiscreteFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw ContractError("DiscreteFunction: null grid");
  if (values.size() != grid->size())
    throw ContractError("DiscreteFunction: " + std::to_string(values.size()) + " values for " +
                        std::to_string(grid->size()) + " cells");
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("DiscreteFunction: non-finite value");
}

DiscreteFunction DiscreteFunction::zeros(const GridPtr& g) { return constant(g, 0.0); }

DiscreteFunction DiscreteFunction::constant(const GridPtr& g, double c) {
  if (!g) throw ContractError("DiscreteFunction: null grid");
  return {g, std::vector<double>(g->size(), c)};
}

DiscreteFunction DiscreteFunction::sample(const GridPtr& g, const std::function<double(double)>& fn) {
  if (!g) throw ContractError("DiscreteFunction: null grid");
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g->cell(i).center);
  return {g, std::move(v)};
}

double DiscreteFunction::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

double DiscreteFunction::min() const { return *std::min_element(values.begin(), values.end()); }
double DiscreteFunction::max() const { return *std::max_element(values.begin(), values.end()); }

double DiscreteFunction::l1_dx() const {
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i) s.add(std::abs(values[i]) * grid->cell(i).dx_measure);
  return s.value();
}

void require_same_grid(const DiscreteFunction& a, const DiscreteFunction& b) {
  if (a.grid != b.grid || a.size() != b.size()) throw ContractError("functions live on different grids");
}

void require_grid(const DiscreteFunction& u, const GridPtr& grid) {
  if (u.grid != grid || u.size() != grid->size())
    throw ContractError("function does not live on the kernel's grid");
}

std::string to_csv(const DiscreteFunction& u) {
  std::string out = "index,center,value\n";
  char line[96];
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17e,%.17e\n", i, u.grid->cell(i).center, u.values[i]);
    out += line;
  }
  return out;
}

DiscreteFunction from_csv(const GridPtr& grid, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<double> values(grid->size(), 0.0);
  std::vector<bool> seen(grid->size(), false);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::size_t index = 0;
    double center = 0.0, value = 0.0;
    if (!(row >> index >> center >> value)) throw ConfigError("malformed CSV row: " + line);
    if (index >= values.size()) throw ConfigError("CSV index out of range: " + std::to_string(index));
    if (std::abs(center - grid->cell(index).center) > 1e-9 * (1.0 + std::abs(center)))
      throw ConfigError("CSV center does not match grid cell " + std::to_string(index));
    values[index] = value;
    seen[index] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ConfigError("CSV does not cover every cell");
  return {grid, std::move(values)};
}

}  // namespace wfpl
