#include "wfpl/special_functions.hpp"

#include <cmath>
#include <numbers>

#include "wfpl/error.hpp"

namespace wfpl {
namespace {

// int_0^pi sin^{N-2} xi (1 - 2 a cos xi + a^2)^{-e/2} dxi. The integrand peaks
// at xi = 0 with width ~ |1-a|, so the range is split geometrically from there.
double angular_integral(double a, int N, double e) {
  auto f = [&](double xi) {
    const double h = std::sin(0.5 * xi);
    const double base = (1.0 - a) * (1.0 - a) + 4.0 * a * h * h;
    const double s = N == 2 ? 1.0 : std::pow(std::sin(xi), N - 2);
    return s * std::pow(base, -0.5 * e);
  };
  const double pi = std::numbers::pi;
  const double gap = std::abs(1.0 - a);
  CompensatedSum total;
  double lo = 0.0;
  double hi = std::min(pi, std::max(gap, 1e-300));
  while (true) {
    const AdaptiveResult r = integrate_adaptive(f, lo, hi, 1e-13);
    if (!r.converged) throw NumericalError("angular integral did not converge", 0, 0);
    total.add(r.value);
    if (hi >= pi) break;
    lo = hi;
    hi = std::min(pi, 2.0 * hi);
  }
  return total.value();
}

double sphere_integral(double a, int N, double e) {
  if (N == 1) return std::pow(std::abs(1.0 - a), -e) + std::pow(1.0 + a, -e);
  return sphere_area(N - 1) * angular_integral(a, N, e);
}

}  // namespace

double sphere_area(int N) {
  if (N < 1) throw DomainError("sphere_area: dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

double kernel_K(double sigma, int N, double theta) {
  if (N < 1) throw DomainError("kernel_K: dimension must be positive");
  if (!(theta > 0.0 && theta < N)) throw DomainError("kernel_K: theta must lie in (0, N)");
  if (!(sigma >= 0.0)) throw DomainError("kernel_K: sigma must be nonnegative");
  if (sigma == 1.0) throw SingularityError("kernel_K: singular at sigma = 1");
  return sphere_integral(sigma, N, N - theta);
}

double kernel_D(double tau, int N, double ps) {
  if (N < 1) throw DomainError("kernel_D: dimension must be positive");
  if (!(ps > 0.0)) throw DomainError("kernel_D: ps must be positive");
  if (!(tau >= 0.0)) throw DomainError("kernel_D: tau must be nonnegative");
  if (tau == 1.0) throw SingularityError("kernel_D: singular at tau = 1");
  return sphere_integral(tau, N, N + ps);
}

SpecialFnTable tabulate_special_functions(int N, double theta, double ps, const std::vector<double>& sigma,
                                          const std::vector<double>& tau) {
  SpecialFnTable t;
  t.dim = N;
  t.theta = theta;
  t.ps = ps;
  t.sigma = sigma;
  t.tau = tau;
  for (double s : sigma) t.K.push_back(kernel_K(s, N, theta));
  for (double x : tau) t.D.push_back(kernel_D(x, N, ps));
  return t;
}

KernelAsymptotics fit_kernel_asymptotics(int N, double theta, double beta) {
  KernelAsymptotics out;
  std::vector<double> x, y;
  for (int k = 0; k <= 12; ++k) {
    const double gap = std::pow(10.0, -8.0 + 0.25 * k);
    x.push_back(std::log(gap));
    y.push_back(std::log(kernel_K(1.0 - gap, N, theta)));
  }
  out.near_one = fit_line(x, y);
  x.clear();
  y.clear();
  for (int k = 0; k <= 12; ++k) {
    const double sigma = std::pow(10.0, 1.0 + 2.0 * k / 12.0);
    x.push_back(std::log(sigma));
    y.push_back(std::log(std::pow(sigma, N - 1.0 - beta) * kernel_K(sigma, N, theta)));
  }
  out.at_infinity = fit_line(x, y);
  return out;
}

}  // namespace wfpl
