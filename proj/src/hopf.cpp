#include "kdvlim/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kdvlim {

namespace {

double sech2(double x) {
  double c = std::cosh(x);
  return 1.0 / (c * c);
}

// Closed-form inverse of the decreasing branch of -sech^2 and derivatives.
double ref_fL(double u, int order) {
  if (u == -1.0 && order == 0) return 0.0;  // hump bottom maps to x = 0
  if (!(u > -1.0) || !(u < 0.0)) throw std::domain_error("f_L: u must lie in (-1, 0)");
  double r = std::sqrt(1.0 + u);
  switch (order) {
    case 0:
      return std::log((1.0 - r) / std::sqrt(-u));
    case 1:
      return 1.0 / (2.0 * u * r);
    case 2:
      return -0.5 / (u * u * r) - 0.25 / (u * r * r * r);
    case 3: {
      double r3 = r * r * r, r5 = r3 * r * r;
      return 1.0 / (u * u * u * r) + 0.5 / (u * u * r3) + 0.375 / (u * r5);
    }
    case 4: {
      double r3 = r * r * r, r5 = r3 * r * r, r7 = r5 * r * r;
      double u2 = u * u;
      return -3.0 / (u2 * u2 * r) - 1.5 / (u2 * u * r3) - 1.125 / (u2 * r5) - 0.9375 / (u * r7);
    }
    default:
      throw std::domain_error("f_L: order must be 0..4");
  }
}

}  // namespace

const InitialDataProfile& reference_profile() {
  static const InitialDataProfile p = [] {
    InitialDataProfile q;
    q.u0 = [](double x) { return -sech2(x); };
    q.u0p = [](double x) { return 2.0 * sech2(x) * std::tanh(x); };
    q.u0pp = [](double x) {
      double s = sech2(x), th = std::tanh(x);
      return 2.0 * s * (s - 2.0 * th * th);
    };
    q.u0ppp = [](double x) {
      double s = sech2(x), th = std::tanh(x);
      return 8.0 * s * th * (th * th - 2.0 * s);
    };
    q.fL = ref_fL;
    q.fR = [](double u) { return -ref_fL(u, 0); };
    q.umin = -1.0;
    q.xmin = 0.0;
    return q;
  }();
  return p;
}

InitialDataProfile make_numeric_profile(std::function<double(double)> u0, double xmin,
                                        double scan_lo, double scan_hi) {
  InitialDataProfile p;
  p.u0 = u0;
  p.xmin = xmin;
  p.umin = u0(xmin);
  p.scan_lo = scan_lo;
  p.scan_hi = scan_hi;
  auto fd1 = [u0](double x) {
    double h = 1e-6;
    return (u0(x + h) - u0(x - h)) / (2.0 * h);
  };
  p.u0p = fd1;
  p.u0pp = [u0](double x) {
    double h = 1e-5;
    return (u0(x + h) - 2.0 * u0(x) + u0(x - h)) / (h * h);
  };
  p.u0ppp = [u0](double x) {
    double h = 1e-4;
    return (u0(x + 2 * h) - 2.0 * u0(x + h) + 2.0 * u0(x - h) - u0(x - 2 * h)) / (2.0 * h * h * h);
  };
  double umin = p.umin, lo = scan_lo, xm = xmin;
  // Invert the decreasing branch on [scan_lo, xmin] by bisection + Newton.
  auto invert = [u0, fd1, umin, lo, xm](double u) {
    if (!(u > umin) || !(u < 0.0)) throw std::domain_error("f_L: u outside (umin, 0)");
    double a = lo, b = xm;
    for (int it = 0; it < 80; ++it) {
      double m = 0.5 * (a + b);
      if (u0(m) > u)
        a = m;  // still above target on the decreasing branch
      else
        b = m;
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 4; ++it) {
      double d = fd1(x);
      if (d == 0.0) break;
      x -= (u0(x) - u) / d;
    }
    return x;
  };
  p.fL = [invert](double u, int order) -> double {
    if (order == 0) return invert(u);
    // Richardson-free central differences of the numeric inverse.
    double h = 1e-4 * std::fmax(1.0, std::fabs(u));
    switch (order) {
      case 1:
        return (invert(u + h) - invert(u - h)) / (2.0 * h);
      case 2:
        return (invert(u + h) - 2.0 * invert(u) + invert(u - h)) / (h * h);
      case 3:
        return (invert(u + 2 * h) - 2.0 * invert(u + h) + 2.0 * invert(u - h) - invert(u - 2 * h)) /
               (2.0 * h * h * h);
      case 4:
        return (invert(u + 2 * h) - 4.0 * invert(u + h) + 6.0 * invert(u) - 4.0 * invert(u - h) +
                invert(u - 2 * h)) /
               (h * h * h * h);
      default:
        throw std::domain_error("f_L: order must be 0..4");
    }
  };
  auto hi = scan_hi;
  p.fR = [u0, fd1, umin, xm, hi](double u) {
    if (!(u > umin) || !(u < 0.0)) throw std::domain_error("f_R: u outside (umin, 0)");
    double a = xm, b = hi;
    for (int it = 0; it < 80; ++it) {
      double m = 0.5 * (a + b);
      if (u0(m) < u)
        a = m;
      else
        b = m;
    }
    return 0.5 * (a + b);
  };
  return p;
}

double profile_inverse_derivs(double u, const InitialDataProfile& p, int order) {
  if (order < 0 || order > 4) throw std::domain_error("profile_inverse_derivs: order must be 0..4");
  if (u == p.umin && order == 0) return p.xmin;
  if (!(u > p.umin) || !(u < 0.0))
    throw std::domain_error("profile_inverse_derivs: u outside (umin, 0)");
  return p.fL(u, order);
}

CatastrophePoint critical_point(const InitialDataProfile& p) {
  // Maximize g(xi) = -6 u0'(xi) on the decreasing branch: coarse scan, then
  // golden-section, then Newton on u0''(xi) = 0.
  const int M = 2000;
  double lo = p.scan_lo, hi = p.xmin;
  double best = lo, bestg = -1e300;
  for (int i = 0; i <= M; ++i) {
    double xi = lo + (hi - lo) * i / M;
    double g = -6.0 * p.u0p(xi);
    if (g > bestg) {
      bestg = g;
      best = xi;
    }
  }
  double a = best - (hi - lo) / M, b = best + (hi - lo) / M;
  const double gr = 0.61803398874989485;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double g1 = -6.0 * p.u0p(x1), g2 = -6.0 * p.u0p(x2);
  for (int it = 0; it < 80; ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + gr * (b - a);
      g2 = -6.0 * p.u0p(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - gr * (b - a);
      g1 = -6.0 * p.u0p(x1);
    }
  }
  double xi = 0.5 * (a + b);
  for (int it = 0; it < 60; ++it) {
    double d2 = p.u0pp(xi), d3 = p.u0ppp(xi);
    if (d3 == 0.0) break;
    double step = d2 / d3;
    xi -= step;
    if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(xi))) break;
  }
  double gmax = -6.0 * p.u0p(xi);
  if (!(gmax > 0.0)) throw std::runtime_error("critical_point: maximization failed");
  CatastrophePoint c;
  c.xi_c = xi;
  c.tc = 1.0 / gmax;
  c.uc = p.u0(xi);
  c.xc = 6.0 * c.tc * c.uc + xi;
  c.k = -p.fL(c.uc, 3) / 6.0;
  return c;
}

HopfSolution hopf_solve(double x, double t, const InitialDataProfile& p) {
  if (t < 0.0) throw std::domain_error("hopf_solve: t must be nonnegative");
  auto h = [&](double xi) { return 6.0 * t * p.u0(xi) + xi - x; };
  auto hp = [&](double xi) { return 6.0 * t * p.u0p(xi) + 1.0; };
  HopfSolution sol;
  const int M = 10000;
  double lo = std::fmin(p.scan_lo, x - 1.0), hi = std::fmax(p.scan_hi, x + 1.0);
  double prev = h(lo), prev_xi = lo;
  for (int i = 1; i <= M; ++i) {
    double xi = lo + (hi - lo) * i / M;
    double cur = h(xi);
    if (prev == 0.0) {
      sol.xi.push_back(prev_xi);
    } else if (prev * cur < 0.0) {
      double a = prev_xi, b = xi, fa = prev;
      for (int it = 0; it < 100; ++it) {
        double m = 0.5 * (a + b), fm = h(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
        if (b - a < 1e-15 * (1.0 + std::fabs(a))) break;
      }
      double r = 0.5 * (a + b);
      for (int it = 0; it < 6; ++it) {
        double d = hp(r);
        if (d == 0.0) break;
        double step = h(r) / d;
        double rn = r - step;
        if (rn < prev_xi || rn > xi) break;  // keep the polish inside the bracket
        r = rn;
        if (std::fabs(step) < 1e-16 * (1.0 + std::fabs(r))) break;
      }
      sol.xi.push_back(r);
    }
    prev = cur;
    prev_xi = xi;
  }
  if (prev == 0.0) sol.xi.push_back(prev_xi);
  if (sol.xi.empty())
    throw root_isolation_error("hopf_solve: no root in scan window [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "] at x=" + std::to_string(x) +
                               " t=" + std::to_string(t));
  double scale = 1.0 + std::fabs(x);
  for (double r : sol.xi)
    if (std::fabs(h(r)) > 1e-12 * scale)
      throw root_isolation_error("hopf_solve: root polish residual " + std::to_string(h(r)) +
                                 " too large at x=" + std::to_string(x));
  std::sort(sol.xi.begin(), sol.xi.end(), [&](double a, double b) { return p.u0(a) < p.u0(b); });
  sol.u.reserve(sol.xi.size());
  for (double r : sol.xi) sol.u.push_back(p.u0(r));
  return sol;
}

std::pair<double, double> fold_points(double t, const InitialDataProfile& p) {
  // Roots of 6 t u0'(xi) + 1 = 0 bracket the fold; they exist only past tc.
  auto g = [&](double xi) { return 6.0 * t * p.u0p(xi) + 1.0; };
  const int M = 10000;
  double lo = p.scan_lo, hi = p.xmin;
  std::vector<double> roots;
  double prev = g(lo), prev_xi = lo;
  for (int i = 1; i <= M; ++i) {
    double xi = lo + (hi - lo) * i / M;
    double cur = g(xi);
    if (prev * cur < 0.0) {
      double a = prev_xi, b = xi, fa = prev;
      for (int it = 0; it < 100; ++it) {
        double m = 0.5 * (a + b), fm = g(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
    prev_xi = xi;
  }
  if (roots.size() != 2)
    throw root_isolation_error("fold_points: expected 2 fold roots, found " +
                               std::to_string(roots.size()) + " at t=" + std::to_string(t));
  double xa = 6.0 * t * p.u0(roots[0]) + roots[0];
  double xb = 6.0 * t * p.u0(roots[1]) + roots[1];
  if (xa > xb) std::swap(xa, xb);
  return {xa, xb};
}

}  // namespace kdvlim
