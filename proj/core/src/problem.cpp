#include "wfpl/problem.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "wfpl/error.hpp"

namespace wfpl {

void ProblemSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  if (dim < 1) fail("dimension N must be a positive integer");
  if (!(s > 0.0 && s < 1.0)) fail("s must lie in (0,1)");
  if (!(p > 1.0)) fail("p must satisfy p > 1");
  if (!(p * s < dim)) fail("standing assumption ps < N violated");
  if (!(beta >= 0.0)) fail("beta must satisfy beta >= 0");
  if (!(beta < (dim - p * s) / 2.0)) fail("standing assumption beta < (N - ps)/2 violated");
  if (!(lambda >= 0.0)) fail("lambda must satisfy lambda >= 0");
  if (!(q_exponent > 0.0)) fail("q_exponent must satisfy q > 0");
  if (!(domain_radius > 0.0)) fail("domain_radius must be positive");
  if (!(exterior_radius >= 4.0 * domain_radius))
    fail("exterior_radius must satisfy exterior_radius >= 4 * domain_radius");
  if (!std::isfinite(exterior_radius)) fail("exterior_radius must be finite");
}

double ProblemSpec::critical_exponent() const { return p * dim / (dim - p * s); }

double ProblemSpec::marcinkiewicz_exponent() const { return (p - 1.0) * dim / (dim - p * s); }

double ProblemSpec::besov_q_limit() const { return dim * (p - 1.0) / (dim - s); }

double ProblemSpec::harnack_q_limit() const { return dim * (p - 1.0) / (dim - p * s); }

double ProblemSpec::log_estimate_exponent() const { return dim - p * s - 2.0 * beta; }

std::uint64_t ProblemSpec::hash() const {
  // FNV-1a over the raw bytes of each field in declaration order.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t n = dim;
  mix(&n, sizeof n);
  for (double v : {s, p, beta, lambda, q_exponent, domain_radius, exterior_radius}) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix(&bits, sizeof bits);
  }
  return h;
}

std::string ProblemSpec::describe() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "N=%d s=%.17g p=%.17g beta=%.17g lambda=%.17g q=%.17g R=%.17g R_ext=%.17g",
                dim, s, p, beta, lambda, q_exponent, domain_radius, exterior_radius);
  return buf;
}

double superlinear_lambda_bar(double q, double p) { return std::pow(2.0, q / (1.0 - p)); }

double stampacchia_gamma(const ProblemSpec& spec, double m) {
  const double pstar = spec.critical_exponent();
  return (pstar / (spec.p - 1.0)) * (1.0 - 1.0 / m - 1.0 / pstar);
}

double besov_theta(const ProblemSpec& spec, double q, double s1) {
  const double q1 = q * s1 / spec.s;
  return spec.ps() * (q - q1) / (spec.p - q);
}

}  // namespace wfpl
