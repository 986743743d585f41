#include "kdvlim/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "kdvlim/parallel.hpp"
#include "kdvlim/quadrature.hpp"
#include "kdvlim/specfun.hpp"

namespace kdvlim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre rule mapped to psi in [0, pi/2], carrying sin/cos tables.
struct PsiRule {
  std::vector<double> s, c, w;  // sin(psi), cos(psi), plain weights
  explicit PsiRule(int n) {
    const GaussLegendre& gl = gl_rule(n);
    s.resize(n);
    c.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
      double psi = 0.25 * kPi * (gl.x[i] + 1.0);
      s[i] = std::sin(psi);
      c[i] = std::cos(psi);
      w[i] = 0.25 * kPi * gl.w[i];
    }
  }
};

const PsiRule& psi_rule(int n) {
  static const PsiRule r64(64);
  static const PsiRule r128(128);
  if (n == 64) return r64;
  if (n == 128) return r128;
  throw std::domain_error("psi_rule: only 64 and 128 cached");
}

// Gauss-Chebyshev angles for the symmetric (beta1, beta2) direction:
// phi_i = (2i-1) pi / (2n), equal weights 1/n in the (1/pi) integral.
struct PhiRule {
  std::vector<double> cos2h, sin2h;  // cos^2(phi/2), sin^2(phi/2)
  explicit PhiRule(int n) {
    cos2h.resize(n);
    sin2h.resize(n);
    for (int i = 0; i < n; ++i) {
      double phi = kPi * (2.0 * i + 1.0) / (2.0 * n);
      double ch = std::cos(0.5 * phi);
      cos2h[i] = ch * ch;
      sin2h[i] = 1.0 - ch * ch;
    }
  }
};

const PhiRule& phi_rule(int n) {
  static const PhiRule r64(64);
  static const PhiRule r128(128);
  if (n == 64) return r64;
  if (n == 128) return r128;
  throw std::domain_error("phi_rule: only 64 and 128 cached");
}

void check_range(double x, const InitialDataProfile& p, const char* what) {
  if (!(x > p.umin) || !(x < 0.0))
    throw std::domain_error(std::string(what) + " outside (umin, 0)");
}

// Plain theta and v-derivatives (single branch), order k = 0..3:
//   int_0^{pi/2} (1 - s^2)^k fL^{(k+1)}(v + s^2 (u - v)) cos(psi) dpsi.
double theta_plain(double v, double u, const InitialDataProfile& p, int k, int n) {
  const PsiRule& r = psi_rule(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.s.size(); ++i) {
    double s2 = r.s[i] * r.s[i];
    double wgt = r.c[i] * r.w[i] * std::pow(1.0 - s2, k);
    acc += wgt * p.fL(v + s2 * (u - v), k + 1);
  }
  return acc;
}

// A(v, u) = int_{umin}^{u} fL'(xi) (v - xi)^{-1/2} dxi and its v-derivatives,
// via xi = umin + (u - umin) sin^2(psi). deriv = 0, 1, 2 multiplies the
// kernel by (-1/2)(v-xi)^{-1} resp. (3/4)(v-xi)^{-2} progressively.
double A_fun(double v, double u, const InitialDataProfile& p, int deriv, int n) {
  const PsiRule& r = psi_rule(n);
  double du = u - p.umin;
  if (!(du > 0.0)) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < r.s.size(); ++i) {
    double s2 = r.s[i] * r.s[i];
    double xi = p.umin + du * s2;
    double g = p.fL(xi, 1) * 2.0 * du * r.s[i] * r.c[i] * r.w[i];
    double d = v - xi;
    double kern = 1.0 / std::sqrt(d);
    if (deriv >= 1) kern *= -0.5 / d;
    if (deriv == 2) kern *= -1.5 / d;  // (-1/2)(-3/2) d^{-5/2}
    acc += g * kern;
  }
  return acc;
}

// Augmented kernel theta~(v; ua) = theta(v; ua) + A(v, ua)/sqrt(v - ua),
// with ua on the increasing flank; orders 0..2 analytic, 3 by differencing.
double theta_aug(double v, double ua, const InitialDataProfile& p, int k, int n) {
  if (!(v > ua)) throw std::domain_error("theta_vu: augmented kernel needs v > reflected u");
  double d = v - ua;
  double rd = std::sqrt(d);
  if (k == 0) return theta_plain(v, ua, p, 0, n) + A_fun(v, ua, p, 0, n) / rd;
  double A0 = A_fun(v, ua, p, 0, n), A1 = A_fun(v, ua, p, 1, n);
  if (k == 1) return theta_plain(v, ua, p, 1, n) + A1 / rd - 0.5 * A0 / (d * rd);
  double A2 = A_fun(v, ua, p, 2, n);
  if (k == 2)
    return theta_plain(v, ua, p, 2, n) + A2 / rd - A1 / (d * rd) + 0.75 * A0 / (d * d * rd);
  double h = 1e-5 * (1.0 + std::fabs(v));
  return (theta_aug(v + h, ua, p, 2, n) - theta_aug(v - h, ua, p, 2, n)) / (2.0 * h);
}

double theta_eval(double v, double u, const InitialDataProfile& p, int k, int n) {
  check_range(v, p, "theta_vu: v");
  if (u >= p.umin)
    return theta_plain(v, u, p, k, n);
  double ua = 2.0 * p.umin - u;
  check_range(ua, p, "theta_vu: reflected u");
  return theta_aug(v, ua, p, k, n);
}

// q0 and partials share one pass over the tensor grid.
struct Q0Eval {
  double q, d1, d2, da;
};

Q0Eval q0_eval(double b1, double b2, double a, const InitialDataProfile& p, int n,
               bool want_partials) {
  const PsiRule& r = psi_rule(n);
  const PhiRule& f = phi_rule(n);
  int nphi = static_cast<int>(f.cos2h.size());
  int npsi = static_cast<int>(r.s.size());
  std::vector<double> rowq(nphi, 0.0), row1(nphi, 0.0), row2(nphi, 0.0), rowa(nphi, 0.0);
  parallel_for(static_cast<std::size_t>(nphi), [&](std::size_t i) {
    double ci = f.cos2h[i] * b1 + f.sin2h[i] * b2;
    double sq = 0.0, s1 = 0.0, sa = 0.0;
    for (int j = 0; j < npsi; ++j) {
      double s2 = r.s[j] * r.s[j];
      double arg = (1.0 - s2) * ci + s2 * a;
      double cw = r.c[j] * r.w[j];
      sq += cw * p.fL(arg, 0);
      if (want_partials) {
        double g = cw * p.fL(arg, 1);
        s1 += g * (1.0 - s2);
        sa += g * s2;
      }
    }
    rowq[i] = sq;
    if (want_partials) {
      row1[i] = s1 * f.cos2h[i];
      row2[i] = s1 * f.sin2h[i];
      rowa[i] = sa;
    }
  });
  Q0Eval out{0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < nphi; ++i) {
    out.q += rowq[i];
    out.d1 += row1[i];
    out.d2 += row2[i];
    out.da += rowa[i];
  }
  double inv = 1.0 / nphi;
  out.q *= inv;
  out.d1 *= inv;
  out.d2 *= inv;
  out.da *= inv;
  return out;
}

// Second-branch shift Delta q(b1, b2, a) and partials:
//   Delta q = (2/pi) int_0^{pi/2} dphi B(lam; a) (lam - a)^{-1/2},
//   lam = b2 + (b1 - b2) sin^2(phi),
//   B(lam; a) = int_{umin}^{a} fL(xi) (lam - xi)^{-1/2} dxi.
struct DqEval {
  double dq, d1, d2, da;
};

DqEval dq_eval(double b1, double b2, double a, const InitialDataProfile& p, int n,
               bool want_partials) {
  DqEval out{0.0, 0.0, 0.0, 0.0};
  double da_ = a - p.umin;
  if (!(da_ > 0.0)) return out;
  const PsiRule& r = psi_rule(n);
  int m = static_cast<int>(r.s.size());
  // Inner-node tables for B and B' at each lambda.
  std::vector<double> xi(m), g(m);
  for (int i = 0; i < m; ++i) {
    xi[i] = p.umin + da_ * r.s[i] * r.s[i];
    g[i] = p.fL(xi[i], 0) * 2.0 * da_ * r.s[i] * r.c[i] * r.w[i];
  }
  double fLa = want_partials ? p.fL(a, 0) : 0.0;
  for (int j = 0; j < m; ++j) {
    double s2 = r.s[j] * r.s[j];
    double lam = b2 + (b1 - b2) * s2;
    double B = 0.0, Bp = 0.0;
    for (int i = 0; i < m; ++i) {
      double d = lam - xi[i];
      double kern = 1.0 / std::sqrt(d);
      B += g[i] * kern;
      if (want_partials) Bp += g[i] * (-0.5) * kern / d;
    }
    double dla = lam - a;
    double rla = std::sqrt(dla);
    double wj = r.w[j];
    out.dq += wj * B / rla;
    if (want_partials) {
      double bracket = Bp / rla - 0.5 * B / (dla * rla);
      out.d1 += wj * s2 * bracket;
      out.d2 += wj * (1.0 - s2) * bracket;
      out.da += wj * (fLa / dla + 0.5 * B / (dla * rla));
    }
  }
  double fac = 2.0 / kPi;
  out.dq *= fac;
  out.d1 *= fac;
  out.d2 *= fac;
  out.da *= fac;
  return out;
}

struct QEval {
  double q, d1, d2, da;
};

QEval q_eval(double b1, double b2, double b3, const InitialDataProfile& p, int n,
             bool want_partials) {
  check_range(b1, p, "q_phase: beta1");
  check_range(b2, p, "q_phase: beta2");
  bool second = b3 < p.umin;
  double a = second ? 2.0 * p.umin - b3 : b3;
  if (!(a >= p.umin) || !(a < 0.0)) throw std::domain_error("q_phase: beta3 out of range");
  if (a > b2 + 1e-12 || b2 > b1 + 1e-12)
    throw std::domain_error("q_phase: branch ordering beta1 >= beta2 >= a violated");
  Q0Eval q0 = q0_eval(b1, b2, a, p, n, want_partials);
  QEval out{q0.q, q0.d1, q0.d2, q0.da};
  if (second) {
    DqEval dq = dq_eval(b1, b2, a, p, n, want_partials);
    out.q += dq.dq;
    out.d1 += dq.d1;
    out.d2 += dq.d2;
    out.da += dq.da;
  }
  return out;
}

// Unchecked hodograph residual; `checked` routes the q evaluation through the
// node-doubling comparison.
std::array<double, 3> hres_impl(const std::array<double, 3>& beta, double x, double t,
                                const InitialDataProfile& p, bool checked) {
  double b1 = beta[0], b2 = beta[1], b3v = beta[2];
  if (b1 - b3v < 1e-12 && b3v >= p.umin) {
    double r = x - 6.0 * b1 * t - p.fL(b1, 0);
    return {r, r, r};
  }
  double a = b3v >= p.umin ? b3v : 2.0 * p.umin - b3v;
  QEval q = q_eval(b1, b2, b3v, p, 64, true);
  if (checked) {
    QEval q2 = q_eval(b1, b2, b3v, p, 128, true);
    double d = std::fabs(q.q - q2.q);
    if (d > 1e-10 * std::fmax(1.0, std::fabs(q.q)))
      throw quadrature_error("hodograph_residual: q quadrature disagreement", d);
  }
  std::array<double, 3> vel = whitham_velocities(b1, b2, a);
  double tot = 2.0 * (b1 + b2 + a);
  std::array<double, 3> dq = {q.d1, q.d2, q.da};
  std::array<double, 3> res;
  for (int i = 0; i < 3; ++i)
    res[i] = x - vel[i] * t - (0.5 * (vel[i] - tot) * dq[i] + q.q);
  return res;
}

double res_norm(const std::array<double, 3>& r) {
  return std::fmax(std::fabs(r[0]), std::fmax(std::fabs(r[1]), std::fabs(r[2])));
}

}  // namespace

double theta_vu(double v, double u, const InitialDataProfile& p, int dv_order, bool check) {
  if (dv_order < 0 || dv_order > 3) throw std::domain_error("theta_vu: dv_order must be 0..3");
  double val = theta_eval(v, u, p, dv_order, 64);
  if (check) {
    double val2 = theta_eval(v, u, p, dv_order, 128);
    double d = std::fabs(val - val2);
    if (d > 1e-10 * std::fmax(1.0, std::fabs(val)))
      throw quadrature_error("theta_vu: node-doubling discrepancy " + std::to_string(d), d);
  }
  return val;
}

double second_branch_A(double v, double u, const InitialDataProfile& p) {
  check_range(u, p, "second_branch_A: u");
  if (!(v > u)) throw std::domain_error("second_branch_A: needs v > u");
  return A_fun(v, u, p, 0, 64);
}

double q_phase(double b1, double b2, double b3, const InitialDataProfile& p, bool check) {
  QEval q = q_eval(b1, b2, b3, p, 64, false);
  if (check) {
    QEval q2 = q_eval(b1, b2, b3, p, 128, false);
    double d = std::fabs(q.q - q2.q);
    if (d > 1e-10 * std::fmax(1.0, std::fabs(q.q)))
      throw quadrature_error("q_phase: node-doubling discrepancy " + std::to_string(d), d);
  }
  return q.q;
}

std::array<double, 3> q_phase_partials(double b1, double b2, double b3,
                                       const InitialDataProfile& p) {
  QEval q = q_eval(b1, b2, b3, p, 64, true);
  return {q.d1, q.d2, q.da};
}

double second_branch_shift(double b1, double b2, double a, const InitialDataProfile& p) {
  check_range(b1, p, "second_branch_shift: beta1");
  if (!(a >= p.umin) || !(a < 0.0))
    throw std::domain_error("second_branch_shift: a outside [umin, 0)");
  return dq_eval(b1, b2, a, p, 64, false).dq;
}

double elliptic_alpha(double b1, double b2, double b3) {
  if (!(b1 > b3)) throw std::domain_error("elliptic_alpha: needs beta1 > beta3");
  double s2 = (b2 - b3) / (b1 - b3);
  s2 = std::fmin(std::fmax(s2, 0.0), 1.0);
  double s = std::sqrt(s2);
  return -b1 + (b1 - b3) * elliptic_E(s) / elliptic_K(s);
}

std::array<double, 3> whitham_velocities(double b1, double b2, double b3) {
  if (!(b1 > b2) || !(b2 > b3))
    throw std::domain_error("whitham_velocities: needs beta1 > beta2 > beta3");
  double al = elliptic_alpha(b1, b2, b3);
  double tot = 2.0 * (b1 + b2 + b3);
  std::array<double, 3> num = {4.0 * (b1 - b2) * (b1 - b3), 4.0 * (b2 - b1) * (b2 - b3),
                               4.0 * (b3 - b1) * (b3 - b2)};
  std::array<double, 3> b = {b1, b2, b3};
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) {
    double den = b[i] + al;
    if (std::fabs(den) < 1e-13)
      throw degenerate_branch_error("whitham_velocities: beta_" + std::to_string(i + 1) +
                                    " + alpha vanishes");
    out[i] = num[i] / den + tot;
  }
  return out;
}

std::array<double, 3> hodograph_residual(const std::array<double, 3>& beta, double x, double t,
                                         const InitialDataProfile& p) {
  return hres_impl(beta, x, t, p, true);
}

namespace {

// ---------------------------------------------------------------------------
// Edge systems
// ---------------------------------------------------------------------------

// Residual of the two confluent equations at fixed t. Out-of-domain iterates
// return a large finite wall so damped Newton backtracks instead of throwing.
struct EdgeSystem {
  EdgeState::Kind kind;
  bool right_flank;
  double t;
  const InitialDataProfile& p;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    double u = x[0], v = x[1];
    Eigen::VectorXd f(2);
    double wall = 1e6 * (1.0 + x.lpNorm<Eigen::Infinity>());
    bool ok;
    if (kind == EdgeState::Kind::leading)
      ok = u > p.umin && u < 0.0 && v > p.umin && v < u;
    else if (!right_flank)
      ok = u > p.umin && u < 0.0 && v > u && v < 0.0;
    else
      ok = u > p.umin && u < 0.0 && v > u && v < 0.0;
    if (!ok) {
      f[0] = wall;
      f[1] = wall;
      return f;
    }
    try {
      if (kind == EdgeState::Kind::leading) {
        f[0] = 6.0 * t + theta_plain(v, u, p, 0, 64);
        f[1] = theta_plain(v, u, p, 1, 64);
      } else {
        auto th = [&](double vv) {
          return right_flank ? theta_aug(vv, u, p, 0, 64) : theta_plain(vv, u, p, 0, 64);
        };
        f[0] = 6.0 * t + th(v);
        const PsiRule& r = psi_rule(64);
        double acc = 0.0;
        for (std::size_t j = 0; j < r.s.size(); ++j) {
          double s2 = r.s[j] * r.s[j];
          acc += r.c[j] * r.w[j] * s2 * (6.0 * t + th(u + (v - u) * s2));
        }
        f[1] = acc;
      }
    } catch (const std::domain_error&) {
      f[0] = wall;
      f[1] = wall;
    }
    return f;
  }
};

// Coarse grid search minimizing |f1| + |f2| over the admissible box.
std::pair<double, double> edge_grid_seed(const EdgeSystem& sys, double uc) {
  const InitialDataProfile& p = sys.p;
  int M = 48;
  double ulo, uhi, vlo, vhi;
  if (sys.kind == EdgeState::Kind::leading) {
    ulo = uc + 1e-3;
    uhi = -1e-3;
    vlo = p.umin + 1e-3;
    vhi = uc - 1e-3;
  } else {
    ulo = p.umin + 1e-3;
    uhi = uc - 1e-3;
    vlo = uc + 1e-3;
    vhi = -1e-3;
  }
  double best = 1e300, bu = 0.5 * (ulo + uhi), bv = 0.5 * (vlo + vhi);
  Eigen::VectorXd x(2);
  for (int i = 0; i <= M; ++i)
    for (int j = 0; j <= M; ++j) {
      x[0] = ulo + (uhi - ulo) * i / M;
      x[1] = vlo + (vhi - vlo) * j / M;
      Eigen::VectorXd f = sys(x);
      double score = std::fabs(f[0]) + std::fabs(f[1]);
      if (score < best) {
        best = score;
        bu = x[0];
        bv = x[1];
      }
    }
  return {bu, bv};
}

struct saturation_signal {};

// Newton at fixed t from a seed; returns false on non-convergence.
bool edge_newton(const EdgeSystem& sys, double& u, double& v, double tol = 1e-12) {
  Eigen::VectorXd x0(2);
  x0 << u, v;
  try {
    Eigen::VectorXd x = newton_solve([&](const Eigen::VectorXd& y) { return sys(y); }, {}, x0,
                                     tol, 50, true);
    u = x[0];
    v = x[1];
    return true;
  } catch (const newton_error&) {
    return false;
  }
}

// Single-flank nested reduction: v(u) from the inner condition, then t(u).
// Mirrors a scan-and-bisect strategy; used as seeding fallback and for the
// near-saturation regime where Newton in (u, v) is ill-conditioned.
double lead_v_of_u(double u, const InitialDataProfile& p) {
  int n = 2000;
  double vlo = p.umin + 5e-4, vhi = u - 1e-4 * std::fabs(u);
  std::vector<double> g(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    double v = vlo + (vhi - vlo) * i / (n - 1);
    g[i] = theta_plain(v, u, p, 1, 64);
  });
  int idx = -1;
  for (int i = 0; i + 1 < n; ++i)
    if (g[i] * g[i + 1] < 0.0) idx = i;  // keep the last crossing
  if (idx < 0) throw continuation_error("leading edge: no interior theta_v zero", -1, 1e300);
  double a = vlo + (vhi - vlo) * idx / (n - 1), b = vlo + (vhi - vlo) * (idx + 1) / (n - 1);
  double fa = g[idx];
  for (int it = 0; it < 80; ++it) {
    double m = 0.5 * (a + b), fm = theta_plain(m, u, p, 1, 64);
    if (fa * fm <= 0.0)
      b = m;
    else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

double trail_G(double v, double u, const InitialDataProfile& p, bool right) {
  const PsiRule& r = psi_rule(64);
  double thv = right ? theta_aug(v, u, p, 0, 64) : theta_plain(v, u, p, 0, 64);
  double acc = 0.0;
  for (std::size_t j = 0; j < r.s.size(); ++j) {
    double s2 = r.s[j] * r.s[j];
    double lam = u + (v - u) * s2;
    double th = right ? theta_aug(lam, u, p, 0, 64) : theta_plain(lam, u, p, 0, 64);
    acc += r.c[j] * r.w[j] * s2 * (th - thv);
  }
  return acc;
}

double trail_v_of_u(double u, const InitialDataProfile& p, bool right) {
  int n = 600;
  double vlo = u + 1e-5, vhi = -1e-3;
  std::vector<double> g(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    double v = vlo + (vhi - vlo) * i / (n - 1);
    g[i] = trail_G(v, u, p, right);
  });
  int idx = -1;
  for (int i = 0; i + 1 < n; ++i)
    if (g[i] * g[i + 1] < 0.0) {
      idx = i;  // first crossing
      break;
    }
  if (idx < 0) throw continuation_error("trailing edge: no interior zero of the flux condition", -1, 1e300);
  double a = vlo + (vhi - vlo) * idx / (n - 1), b = vlo + (vhi - vlo) * (idx + 1) / (n - 1);
  double fa = g[idx];
  for (int it = 0; it < 80; ++it) {
    double m = 0.5 * (a + b), fm = trail_G(m, u, p, right);
    if (fa * fm <= 0.0)
      b = m;
    else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

double lead_t_of_u(double u, const InitialDataProfile& p) {
  return -theta_plain(lead_v_of_u(u, p), u, p, 0, 64) / 6.0;
}

double trail_t_of_u(double u, const InitialDataProfile& p, bool right) {
  double v = trail_v_of_u(u, p, right);
  double th = right ? theta_aug(v, u, p, 0, 64) : theta_plain(v, u, p, 0, 64);
  return -th / 6.0;
}

// Bracket t on a ladder of u values, bisect 40 steps, then Newton polish.
bool ladder_solve(const std::vector<double>& ladder, double t, const InitialDataProfile& p,
                  EdgeState::Kind kind, bool right, double& u_out, double& v_out) {
  auto tf = [&](double u) {
    return kind == EdgeState::Kind::leading ? lead_t_of_u(u, p) : trail_t_of_u(u, p, right);
  };
  double prev = ladder[0], fp;
  try {
    fp = tf(prev) - t;
  } catch (const continuation_error&) {
    return false;
  }
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    double z = ladder[i], fz;
    try {
      fz = tf(z) - t;
    } catch (const continuation_error&) {
      prev = z;
      continue;
    }
    if (fp * fz <= 0.0) {
      double a = prev, b = z, fa = fp;
      for (int it = 0; it < 40; ++it) {
        double m = 0.5 * (a + b), fm = tf(m) - t;
        if (fa * fm <= 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      double u = 0.5 * (a + b);
      double v = kind == EdgeState::Kind::leading ? lead_v_of_u(u, p) : trail_v_of_u(u, p, right);
      EdgeSystem sys{kind, right, t, p};
      edge_newton(sys, u, v);  // polish; keep bisection result on failure
      u_out = u;
      v_out = v;
      return true;
    }
    prev = z;
    fp = fz;
  }
  return false;
}

EdgeState finalize_edge(EdgeState::Kind kind, bool right, double t, double u, double v,
                        const InitialDataProfile& p) {
  EdgeSystem sys{kind, right, t, p};
  Eigen::VectorXd x(2);
  x << u, v;
  Eigen::VectorXd f = sys(x);
  EdgeState e;
  e.kind = kind;
  e.right_flank = right;
  e.t = t;
  e.u = u;
  e.v = v;
  e.solve_residual = std::fmax(std::fabs(f[0]), std::fabs(f[1]));
  if (kind == EdgeState::Kind::leading) {
    if (!(u > v)) throw continuation_error("leading edge: ordering u > v violated", -1, e.solve_residual);
    e.x_edge = 6.0 * t * u + p.fL(u, 0);
    e.theta_v = theta_plain(v, u, p, 1, 64);
    e.theta_vv = theta_plain(v, u, p, 2, 64);
    e.theta_vvv = theta_plain(v, u, p, 3, 64);
    e.c = -std::sqrt(u - v) * e.theta_vv;
    if (!(e.c > 0.0)) throw continuation_error("leading edge: c must be positive", -1, e.solve_residual);
  } else {
    if (!(v > u)) throw continuation_error("trailing edge: ordering v > u violated", -1, e.solve_residual);
    e.x_edge = right ? 6.0 * t * u + p.fR(u) : 6.0 * t * u + p.fL(u, 0);
    if (right) {
      e.theta_v = theta_aug(v, u, p, 1, 64);
      e.theta_vv = theta_aug(v, u, p, 2, 64);
      e.theta_vvv = theta_aug(v, u, p, 3, 64);
    } else {
      e.theta_v = theta_plain(v, u, p, 1, 64);
      e.theta_vv = theta_plain(v, u, p, 2, 64);
      e.theta_vvv = theta_plain(v, u, p, 3, 64);
    }
    if (!(e.theta_v < 0.0))
      throw continuation_error("trailing edge: theta_v must be negative", -1, e.solve_residual);
    e.gamma = 4.0 * std::pow(v - u, 1.25) * std::sqrt(-e.theta_v);
  }
  return e;
}

// Continuation in t: grid-search seed at t0 = tc + 0.05, walk to the target;
// near tc seed from the square-root collapse law instead.
EdgeState edge_by_continuation(EdgeState::Kind kind, double t, const InitialDataProfile& p) {
  CatastrophePoint cp = critical_point(p);
  if (!(t > cp.tc)) throw std::domain_error("edge solve: requires t > tc");
  double t0 = cp.tc + 0.05;
  double u, v;
  bool have = false;
  if (t < t0) {
    // Collapse-law predictor at the target itself.
    double del = std::sqrt((t - cp.tc) / cp.k);
    double s3 = std::sqrt(3.0), s15 = std::sqrt(15.0);
    if (kind == EdgeState::Kind::leading) {
      u = cp.uc + 2.0 * s3 * del;
      v = cp.uc - 0.5 * s3 * del;
    } else {
      u = cp.uc - 2.0 / 3.0 * s15 * del;
      v = cp.uc + 0.5 * s15 * del;
    }
    EdgeSystem sys{kind, false, t, p};
    if (edge_newton(sys, u, v)) {
      // Guard against a jump off the collapsing branch.
      double dev = kind == EdgeState::Kind::leading ? u - cp.uc : cp.uc - u;
      double pred = kind == EdgeState::Kind::leading ? 2.0 * s3 * del : 2.0 / 3.0 * s15 * del;
      if (dev > 0.2 * pred && dev < 5.0 * pred) have = true;
    }
  }
  if (!have) {
    EdgeSystem seed_sys{kind, false, t0, p};
    auto uv = edge_grid_seed(seed_sys, cp.uc);
    u = uv.first;
    v = uv.second;
    if (!edge_newton(seed_sys, u, v))
      throw continuation_error("edge solve: seed Newton failed at t0", -1, 1e300);
    double tcur = t0;
    double step = (t > t0 ? 1.0 : -1.0) * 0.02;
    while (std::fabs(tcur - t) > 1e-14) {
      double tn = (step > 0) ? std::fmin(tcur + step, t) : std::fmax(tcur + step, t);
      EdgeSystem sys{kind, false, tn, p};
      double un = u, vn = v;
      if (edge_newton(sys, un, vn)) {
        if (kind == EdgeState::Kind::trailing && un < p.umin + 1e-6) throw saturation_signal{};
        u = un;
        v = vn;
        tcur = tn;
        step *= 1.5;
        if (std::fabs(step) > 0.02) step = (step > 0 ? 0.02 : -0.02);
      } else {
        step *= 0.5;
        if (std::fabs(step) < 1e-7)
          throw continuation_error("edge solve: continuation stalled at t=" + std::to_string(tcur),
                                   -1, 1e300);
      }
    }
  }
  return finalize_edge(kind, false, t, u, v, p);
}

std::vector<double> single_flank_u_ladder(double umin) {
  // w = sqrt(u - umin) ladder: linear sweep, then geometric refinement toward
  // the flank-switch saturation.
  std::vector<double> ws;
  for (int i = 0; i < 25; ++i) ws.push_back(0.57 - (0.57 - 0.04) * i / 24.0);
  for (double w : {0.02, 0.01, 5e-3, 2.5e-3, 1.2e-3, 6e-4, 3e-4, 1.5e-4, 7e-5}) ws.push_back(w);
  std::vector<double> us;
  for (double w : ws) us.push_back(umin + w * w);
  return us;
}

std::vector<double> right_flank_u_ladder(double umin) {
  std::vector<double> offs = {1e-6, 5e-4, 2e-3, 5e-3, 1e-2, 2e-2, 3.5e-2, 5.5e-2,
                              8e-2, 0.11, 0.15, 0.2, 0.26, 0.34, 0.44, 0.56, 0.7};
  std::vector<double> us;
  for (double o : offs) us.push_back(umin + o);
  return us;
}

}  // namespace

EdgeState solve_leading_edge(double t, const InitialDataProfile& p) {
  EdgeState e = edge_by_continuation(EdgeState::Kind::leading, t, p);
  return e;
}

EdgeState solve_trailing_edge(double t, const InitialDataProfile& p) {
  CatastrophePoint cp = critical_point(p);
  if (!(t > cp.tc)) throw std::domain_error("solve_trailing_edge: requires t > tc");
  // The single-flank confluent system loses its solution when the deep
  // characteristic foot reaches the hump bottom; past that the right-flank
  // (augmented theta) system takes over. Route by attempt.
  bool try_single_newton = t <= cp.tc + 0.079;  // comfortably below the switch
  if (try_single_newton) {
    try {
      return edge_by_continuation(EdgeState::Kind::trailing, t, p);
    } catch (const saturation_signal&) {
      // fall through to the ladder-based near-switch handling
    }
  }
  double u, v;
  if (ladder_solve(single_flank_u_ladder(p.umin), t, p, EdgeState::Kind::trailing, false, u, v))
    return finalize_edge(EdgeState::Kind::trailing, false, t, u, v, p);
  if (ladder_solve(right_flank_u_ladder(p.umin), t, p, EdgeState::Kind::trailing, true, u, v))
    return finalize_edge(EdgeState::Kind::trailing, true, t, u, v, p);
  throw continuation_error("solve_trailing_edge: no flank system bracketed t=" + std::to_string(t),
                           -1, 1e300);
}

namespace {

// ---------------------------------------------------------------------------
// Zone solver
// ---------------------------------------------------------------------------

std::array<double, 3> solve_node(double x, double t, const InitialDataProfile& p,
                                 const std::array<double, 3>& seed, int node_index) {
  auto objective = [&](const Eigen::VectorXd& b) -> double {
    std::array<double, 3> beta = {b[0], b[1], b[2]};
    double a = beta[2] >= p.umin ? beta[2] : 2.0 * p.umin - beta[2];
    if (!(beta[0] < 0.0) || !(beta[0] > p.umin) || !(beta[1] < beta[0]) || !(a < beta[1]) ||
        !(beta[1] > p.umin))
      return 1e12 + b.lpNorm<Eigen::Infinity>();
    try {
      std::array<double, 3> r = hres_impl(beta, x, t, p, false);
      return r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    } catch (const std::exception&) {
      return 1e12 + b.lpNorm<Eigen::Infinity>();
    }
  };
  Eigen::VectorXd b0(3);
  b0 << seed[0], seed[1], seed[2];
  Eigen::VectorXd bnm;
  try {
    bnm = nelder_mead_min(objective, b0, 1e-9, 250);
  } catch (const nm_budget_error& e) {
    bnm = e.best;
  }
  auto residual = [&](const Eigen::VectorXd& b) {
    std::array<double, 3> beta = {b[0], b[1], b[2]};
    Eigen::VectorXd f(3);
    double obj = objective(b);
    if (obj >= 1e12) {
      f.setConstant(1e6 * (1.0 + b.lpNorm<Eigen::Infinity>()));
      return f;
    }
    std::array<double, 3> r = hres_impl(beta, x, t, p, false);
    f << r[0], r[1], r[2];
    return f;
  };
  Eigen::VectorXd sol;
  try {
    sol = newton_solve(residual, {}, bnm, 1e-11, 30, true);
  } catch (const newton_error& e) {
    if (residual(bnm).lpNorm<Eigen::Infinity>() < 1e-8)
      sol = bnm;
    else
      throw continuation_error("solve_whitham_zone: node solve failed at x=" + std::to_string(x),
                               node_index, e.last_residual);
  }
  std::array<double, 3> out = {sol[0], sol[1], sol[2]};
  double jump = std::fmax(std::fabs(out[0] - seed[0]),
                          std::fmax(std::fabs(out[1] - seed[1]), std::fabs(out[2] - seed[2])));
  if (jump > 0.5)
    throw continuation_error("solve_whitham_zone: continuation jumped branches at x=" +
                                 std::to_string(x),
                             node_index, jump);
  return out;
}

}  // namespace

std::array<double, 3> WhithamBranches::eval(double x) const {
  double tol = 1e-9 * (1.0 + std::fabs(xplus - xminus));
  if (x < xminus - tol || x > xplus + tol)
    throw std::domain_error("WhithamBranches::eval: x outside zone");
  x = std::fmin(std::fmax(x, xminus), xplus);
  double D = xplus - xminus;
  double m = mid();
  int half = x <= m ? 0 : 1;
  double l;
  if (half == 0)
    l = -1.0 + 2.0 * std::sqrt(std::fmax(0.0, (x - xminus) * 2.0 / D));
  else
    l = 1.0 - 2.0 * std::sqrt(std::fmax(0.0, (xplus - x) * 2.0 / D));
  l = std::fmin(std::fmax(l, -1.0), 1.0);
  return {barycentric_eval(beta[half][0], l), barycentric_eval(beta[half][1], l),
          barycentric_eval(beta[half][2], l)};
}

WhithamBranches solve_whitham_zone(double t, int Nc, const InitialDataProfile& p) {
  if (Nc < 16) throw std::domain_error("solve_whitham_zone: Nc must be >= 16");
  WhithamBranches wb;
  wb.t = t;
  wb.Nc = Nc;
  wb.lead = solve_leading_edge(t, p);
  wb.trail = solve_trailing_edge(t, p);
  wb.xminus = wb.lead.x_edge;
  wb.xplus = wb.trail.x_edge;
  double D = wb.xplus - wb.xminus;
  if (!(D > 0.0)) throw continuation_error("solve_whitham_zone: empty zone", -1, D);
  ChebGrid lgrid = ChebGrid::make(Nc, -1.0, 1.0);

  std::array<std::array<std::vector<double>, 3>, 2> vals;
  for (int h = 0; h < 2; ++h) {
    wb.node_x[h].resize(Nc + 1);
    wb.residual[h].assign(Nc + 1, 0.0);
    for (int b = 0; b < 3; ++b) vals[h][b].assign(Nc + 1, 0.0);
    for (int j = 0; j <= Nc; ++j) {
      double l = lgrid.lnodes[j];
      wb.node_x[h][j] = h == 0 ? wb.xminus + 0.5 * D * (1.0 + l) * (1.0 + l) / 4.0
                               : wb.xplus - 0.5 * D * (1.0 - l) * (1.0 - l) / 4.0;
    }
  }

  double b3_trail = wb.trail.right_flank ? 2.0 * p.umin - wb.trail.u : wb.trail.u;

  // Half 0: from the x- edge node (j = Nc, l = -1) toward the midpoint.
  vals[0][0][Nc] = wb.lead.u;
  vals[0][1][Nc] = wb.lead.v;
  vals[0][2][Nc] = wb.lead.v;
  wb.residual[0][Nc] = wb.lead.solve_residual;
  for (int j = Nc - 1; j >= 0; --j) {
    std::array<double, 3> seed;
    for (int b = 0; b < 3; ++b) {
      if (j + 2 <= Nc) {
        double l1 = lgrid.lnodes[j + 1], l2 = lgrid.lnodes[j + 2], l = lgrid.lnodes[j];
        seed[b] = vals[0][b][j + 1] +
                  (vals[0][b][j + 1] - vals[0][b][j + 2]) * (l - l1) / (l1 - l2);
      } else {
        seed[b] = vals[0][b][j + 1];
      }
    }
    // The confluent pair splits like sqrt(x - x-): widen the first seed.
    if (j == Nc - 1) {
      double g = std::sqrt((wb.node_x[0][j] - wb.xminus) / D) * (wb.lead.u - wb.lead.v);
      seed[1] = wb.lead.v + 0.35 * g;
      seed[2] = wb.lead.v - 0.35 * g;
    }
    std::array<double, 3> s = solve_node(wb.node_x[0][j], t, p, seed, j);
    for (int b = 0; b < 3; ++b) vals[0][b][j] = s[b];
  }

  // Half 1: from the x+ edge node (j = 0, l = 1) toward the midpoint.
  vals[1][0][0] = wb.trail.v;
  vals[1][1][0] = wb.trail.v;
  vals[1][2][0] = b3_trail;
  wb.residual[1][0] = wb.trail.solve_residual;
  for (int j = 1; j <= Nc; ++j) {
    std::array<double, 3> seed;
    for (int b = 0; b < 3; ++b) {
      if (j - 2 >= 0) {
        double l1 = lgrid.lnodes[j - 1], l2 = lgrid.lnodes[j - 2], l = lgrid.lnodes[j];
        seed[b] = vals[1][b][j - 1] +
                  (vals[1][b][j - 1] - vals[1][b][j - 2]) * (l - l1) / (l1 - l2);
      } else {
        seed[b] = vals[1][b][j - 1];
      }
    }
    if (j == 1) {
      double g = std::sqrt((wb.xplus - wb.node_x[1][j]) / D) * (wb.trail.v - wb.trail.u);
      seed[0] = wb.trail.v + 0.35 * g;
      seed[1] = wb.trail.v - 0.35 * g;
    }
    std::array<double, 3> s = solve_node(wb.node_x[1][j], t, p, seed, Nc + 1 + j);
    for (int b = 0; b < 3; ++b) vals[1][b][j] = s[b];
  }

  // Checked residual verification at interior nodes.
  for (int h = 0; h < 2; ++h)
    for (int j = 0; j <= Nc; ++j) {
      bool is_edge = (h == 0 && j == Nc) || (h == 1 && j == 0);
      if (is_edge) continue;
      std::array<double, 3> beta = {vals[h][0][j], vals[h][1][j], vals[h][2][j]};
      wb.residual[h][j] = res_norm(hres_impl(beta, wb.node_x[h][j], t, p, true));
    }

  for (int h = 0; h < 2; ++h)
    for (int b = 0; b < 3; ++b) wb.beta[h][b] = ChebFunction::from_values(lgrid, vals[h][b]);

  // Graze point: where the stored beta3 crosses the hump bottom.
  for (int h = 0; h < 2 && !wb.has_graze; ++h) {
    const std::vector<double>& b3 = vals[h][2];
    for (int j = 0; j + 1 <= Nc; ++j) {
      double f0 = b3[j] - p.umin, f1 = b3[j + 1] - p.umin;
      if (f0 == 0.0 || f0 * f1 < 0.0) {
        double w = f0 == 0.0 ? 0.0 : f0 / (f0 - f1);
        Eigen::VectorXd z(3);
        z << vals[h][0][j] * (1 - w) + vals[h][0][j + 1] * w,
            vals[h][1][j] * (1 - w) + vals[h][1][j + 1] * w,
            wb.node_x[h][j] * (1 - w) + wb.node_x[h][j + 1] * w;
        auto graze_res = [&](const Eigen::VectorXd& y) {
          std::array<double, 3> beta = {y[0], y[1], p.umin};
          std::array<double, 3> r = hres_impl(beta, y[2], t, p, false);
          Eigen::VectorXd f(3);
          f << r[0], r[1], r[2];
          return f;
        };
        Eigen::VectorXd g = newton_solve(graze_res, {}, z, 1e-10, 40, true);
        wb.has_graze = true;
        wb.b1_at_x0 = g[0];
        wb.b2_at_x0 = g[1];
        wb.x0 = g[2];
        break;
      }
    }
  }
  return wb;
}

void write_branches_csv(const std::string& path, const WhithamBranches& b) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_branches_csv: cannot open " + path);
  std::fprintf(f, "# whitham-branches t=%.17g Nc=%d xminus=%.17g xplus=%.17g\n", b.t, b.Nc,
               b.xminus, b.xplus);
  int Nc = b.Nc;
  auto row = [&](int h, int j) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", b.node_x[h][j], b.beta[h][0].values[j],
                 b.beta[h][1].values[j], b.beta[h][2].values[j], b.residual[h][j]);
  };
  for (int j = Nc; j >= 0; --j) row(0, j);       // x- up to midpoint
  for (int j = Nc - 1; j >= 0; --j) row(1, j);   // midpoint (skipped dup) to x+
  std::fclose(f);
}

}  // namespace kdvlim
