#pragma once

#include "pdeetc/quadrature.hpp"

#include <string>
#include <vector>

namespace pdeetc {

/// Named spatial profiles. Besides the fixed Example 1/2 names, accepts the
/// parametric forms "const(v)", "sin(k)", "cos(k)" and "mode(k)" (the k-th
/// orthonormal Dirichlet sine on `domain`).
Profile builtin_profile(const std::string& name, Interval domain);
std::vector<std::string> builtin_profile_names();

/// Pointwise polynomial nonlinearity f(x) = sum_k c_k x^k with c_0 = 0.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const;
  double derivative(double x) const;
  bool zero_at_origin() const { return coeffs.empty() || coeffs[0] == 0.0; }
};

/// Largest sampled difference quotient |f(a)-f(b)|/|a-b| on [-bound, bound].
double sampled_lipschitz(const Polynomial& f, double bound, int samples = 401);

}  // namespace pdeetc
