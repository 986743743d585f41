#pragma once

// Initial-data profile machinery and the characteristic solution of
// u_t + 6 u u_x = 0, including the gradient-catastrophe point.

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kdvlim {

// Single-hump negative profile together with the inverses of its two
// monotone branches. fL inverts the decreasing branch (x <= hump bottom),
// fR the increasing branch; for an even profile fR = -fL.
struct InitialDataProfile {
  std::function<double(double)> u0;
  std::function<double(double)> u0p;   // u0'
  std::function<double(double)> u0pp;  // u0''
  std::function<double(double)> u0ppp; // u0'''
  // Inverse of the decreasing branch; order = 0..4 selects f_L^{(order)}.
  std::function<double(double, int)> fL;
  std::function<double(double)> fR;
  double umin = -1.0;  // hump minimum value
  double xmin = 0.0;   // hump bottom location
  double scan_lo = -15.707963267948966;  // root-scan window [lo, hi]
  double scan_hi = 15.707963267948966;
};

// u0(x) = -sech^2 x with all inverses in closed form.
const InitialDataProfile& reference_profile();

// Profile from samples of u0 alone: branch inverses by monotone numeric
// inversion (bisection + Newton, tolerance 1e-10), inverse derivatives by
// high-order finite differences of the numeric f_L.
InitialDataProfile make_numeric_profile(std::function<double(double)> u0, double xmin,
                                        double scan_lo, double scan_hi);

// f_L^{(order)}(u) for 0 <= order <= 4; domain error at u <= umin or u >= 0.
double profile_inverse_derivs(double u, const InitialDataProfile& p, int order);

struct CatastrophePoint {
  double xc = 0.0;
  double tc = 0.0;
  double uc = 0.0;
  double k = 0.0;    // -f_L'''(uc)/6
  double xi_c = 0.0; // characteristic foot of the catastrophe point
};

// Gradient catastrophe data: tc = 1/max(-6 u0'), maximizer xi_c, uc = u0(xi_c),
// xc = 6 tc uc + xi_c.
CatastrophePoint critical_point(const InitialDataProfile& p);

// All real characteristic roots at (x, t): xi solves x = 6 t u0(xi) + xi,
// u = u0(xi). Roots are sorted by increasing u. One root before the
// catastrophe, three inside the fold.
struct HopfSolution {
  std::vector<double> xi;
  std::vector<double> u;
};

struct root_isolation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

HopfSolution hopf_solve(double x, double t, const InitialDataProfile& p);

// Fold boundaries in x at time t > tc: images of the roots of
// 6 t u0'(xi) + 1 = 0, sorted ascending.
std::pair<double, double> fold_points(double t, const InitialDataProfile& p);

}  // namespace kdvlim
