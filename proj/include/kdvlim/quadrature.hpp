#pragma once
#include <functional>
#include <vector>

namespace kdvlim {

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};

// Cached rule shared across callers (rules are immutable once built).
const GaussLegendre& gl_rule(int n);

// Integrate f over [a, b] with the n-point rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace kdvlim
