#pragma once

#include <vector>

#include "wfpl/quadrature.hpp"

namespace wfpl {

/// Surface measure of the unit sphere S^{N-1} in R^N (2 for N = 1).
double sphere_area(int N);

/// Angular kernel K(sigma) = int_{|y'|=1} dH^{N-1}(y') / |x' - sigma y'|^{N-theta}.
/// N >= 2 reduces to |S^{N-2}| int_0^pi sin^{N-2} xi (1 - 2 sigma cos xi + sigma^2)^{-(N-theta)/2};
/// N = 1 is the two-point sum |1-sigma|^{-(1-theta)} + (1+sigma)^{-(1-theta)}.
/// Throws SingularityError at sigma = 1, DomainError unless 0 < theta < N.
double kernel_K(double sigma, int N, double theta);

/// Exterior angular kernel of the log estimate, same sphere integral with
/// exponent N + ps. Defined for tau >= 0, tau != 1.
double kernel_D(double tau, int N, double ps);

struct SpecialFnTable {
  int dim = 1;
  double theta = 0.0;
  double ps = 0.0;
  std::vector<double> sigma;
  std::vector<double> K;
  std::vector<double> tau;
  std::vector<double> D;
};

SpecialFnTable tabulate_special_functions(int N, double theta, double ps, const std::vector<double>& sigma,
                                          const std::vector<double>& tau);

struct KernelAsymptotics {
  LineFit near_one;  // log K vs log|1 - sigma|, sigma -> 1-
  LineFit at_infinity;  // log(sigma^{N-1-beta} K) vs log sigma over [10, 1e3]
};

/// Log-log fits of the two asymptotic regimes of K.
KernelAsymptotics fit_kernel_asymptotics(int N, double theta, double beta);

}  // namespace wfpl
