#include "kdvlim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Dense>

#include "kdvlim/chebcore.hpp"
#include "kdvlim/quadrature.hpp"
#include "kdvlim/specfun.hpp"

namespace kdvlim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sech2(double x) {
  if (std::abs(x) > 350.0) return 0.0;
  double s = 1.0 / std::cosh(x);
  return s * s;
}

// Hastings-McLeod value/derivative with the asymptotic tails taking over
// outside the solved window.
double hm_value(const PainleveSolution& sol, double s, int deriv) {
  if (s >= sol.grid.a && s <= sol.grid.b) return deriv ? sol.deriv(s) : sol.value(s);
  static const AsymptoticTail left = tail_series_pii(-1, 12);
  static const AsymptoticTail right = tail_series_pii(+1, 12);
  const AsymptoticTail& tail = (s < sol.grid.a) ? left : right;
  return deriv ? tail.eval_deriv(s) : tail.eval(s);
}

// int_v^u (f_L'(xi) + 6 t) sqrt(xi - v) dxi with the edge square root
// absorbed by xi = v + (u - v) sigma^2.
double phase_integral(double v, double u, double t, const InitialDataProfile& p) {
  const GaussLegendre& gl = gl_rule(64);
  double acc = 0.0;
  for (size_t j = 0; j < gl.x.size(); ++j) {
    double sig = 0.5 * (gl.x[j] + 1.0);
    double w = 0.5 * gl.w[j];
    double xi = v + (u - v) * sig * sig;
    acc += w * (p.fL(xi, 1) + 6.0 * t) * sig * sig;
  }
  return 2.0 * std::pow(u - v, 1.5) * acc;
}

}  // namespace

double weak_limit(const std::array<double, 3>& beta) {
  return beta[0] + beta[1] + beta[2] + 2.0 * elliptic_alpha(beta[0], beta[1], beta[2]);
}

double cnoidal_wave(double x, double t, double eps, const std::array<double, 3>& beta, double q) {
  double b1 = beta[0], b2 = beta[1], b3 = beta[2];
  if (!(b1 > b2 && b2 > b3)) throw std::invalid_argument("cnoidal_wave: branch points unordered");
  double m2 = (b2 - b3) / (b1 - b3);
  double s = std::sqrt(m2);
  double K = elliptic_K(s);
  // z = 2 K Omega + K written without the K/K cancellation
  double z = std::sqrt(b1 - b3) / eps * (x - 2.0 * t * (b1 + b2 + b3) - q) + K;
  double dn = jacobi_dn(z, s);
  return b2 + b3 - b1 + 2.0 * (b1 - b3) * dn * dn;
}

OnePhaseParams one_phase_params(double x, double t, double eps, const WhithamBranches& br,
                                const InitialDataProfile& p) {
  std::array<double, 3> bv = br.eval(x);
  OnePhaseParams out;
  double b1 = bv[0], b2 = bv[1];
  double a = bv[2] >= p.umin ? bv[2] : 2.0 * p.umin - bv[2];
  if (!(b1 >= b2 && b2 >= a))
    throw std::runtime_error("one_phase_params: interpolated branches unordered");
  out.beta = {b1, b2, a};
  double m2 = (b2 - a) / (b1 - a);
  m2 = std::min(std::max(m2, 0.0), 1.0 - 1e-16);
  out.s = std::sqrt(m2);
  double K = elliptic_K(out.s);
  out.imT = elliptic_K(std::sqrt(1.0 - m2)) / K;
  out.alpha = elliptic_alpha(b1, b2, a);
  out.qshift = q_phase(b1, b2, bv[2], p, false);
  out.Omega = std::sqrt(b1 - a) / (2.0 * eps * K) * (x - 2.0 * t * (b1 + b2 + a) - out.qshift);
  return out;
}

double one_phase_approx(double x, double t, double eps, const WhithamBranches& br,
                        const InitialDataProfile& p, bool theta_form) {
  OnePhaseParams pr = one_phase_params(x, t, eps, br, p);
  double b1 = pr.beta[0], b2 = pr.beta[1], a = pr.beta[2];
  double K = elliptic_K(pr.s);
  if (theta_form) {
    return b1 + b2 + a + 2.0 * pr.alpha +
           (b1 - a) / (2.0 * K * K) * theta3_ddlog(pr.Omega, pr.imT);
  }
  double z = 2.0 * K * pr.Omega + K;
  double dn = jacobi_dn(z, pr.s);
  return b2 + a - b1 + 2.0 * (b1 - a) * dn * dn;
}

LeadingEdgeFrame leading_edge_frame(double x, double t, double eps, const EdgeState& e,
                                    const PainleveSolution& hm, const InitialDataProfile& p) {
  LeadingEdgeFrame f;
  f.edge = e;
  f.c = e.c;
  double u = e.u, v = e.v;
  double dx = x - e.x_edge;
  f.sPII = -dx / (std::cbrt(e.c) * std::sqrt(u - v) * std::pow(eps, 2.0 / 3.0));
  f.Theta = 2.0 * std::sqrt(u - v) * dx + 2.0 * phase_integral(v, u, t, p);

  double q = hm_value(hm, f.sPII, 0);
  double qp = hm_value(hm, f.sPII, 1);
  double pfn = -q * q * q * q - f.sPII * q * q + qp * qp;
  double ratio = qp / q;
  double flp = 6.0 * t + p.fL(u, 1);
  double s2 = f.sPII * f.sPII;
  f.Theta1 = (1.0 / std::cbrt(e.c)) *
             ((ratio + pfn) * e.theta_vvv / (6.0 * e.theta_vv) -
              (5.0 * pfn + ratio) / (4.0 * (u - v)) +
              (s2 / 4.0) * (e.theta_vvv / (3.0 * e.theta_vv) - 1.5 / (u - v) +
                            2.0 * e.c * std::sqrt(u - v) / flp));
  return f;
}

double leading_edge_approx(double x, double t, double eps, const EdgeState& e,
                           const PainleveSolution& hm, const InitialDataProfile& p,
                           bool include_order23) {
  LeadingEdgeFrame f = leading_edge_frame(x, t, eps, e, hm, p);
  double q = hm_value(hm, f.sPII, 0);
  double c13 = std::cbrt(e.c);
  double e13 = std::cbrt(eps);
  double envelope = 4.0 * e13 / c13 * q;
  if (!include_order23) return e.u - envelope * std::cos(f.Theta / eps);
  double flp = 6.0 * t + p.fL(e.u, 1);
  double sn = std::sin(f.Theta / eps);
  return e.u - envelope * std::cos(f.Theta / eps + e13 * f.Theta1) + (x - e.x_edge) / flp -
         4.0 * e13 * e13 / (c13 * c13 * (e.u - e.v)) * q * q * sn * sn;
}

SolitonTrain soliton_train(double x, double t, double eps, const EdgeState& e, double M) {
  SolitonTrain tr;
  tr.edge = e;
  tr.M = M;
  tr.gamma = e.gamma;
  double leps = std::log(eps);
  tr.y = 2.0 * std::sqrt(e.v - e.u) * (x - e.x_edge) / (eps * leps);
  double lgam = std::log(e.gamma);
  int jmax = static_cast<int>(std::ceil(M));
  tr.Xj.reserve(jmax + 1);
  for (int j = 0; j <= jmax; ++j) {
    tr.Xj.push_back(0.5 * (0.5 - tr.y + j) * leps -
                    std::log(std::sqrt(2.0 * kPi) * hermite_norm(j)) - (j + 0.5) * lgam);
  }
  return tr;
}

double trailing_edge_approx(double x, double t, double eps, const EdgeState& e, double M) {
  SolitonTrain tr = soliton_train(x, t, eps, e, M);
  double sum = 0.0;
  for (double Xj : tr.Xj) sum += sech2(Xj);
  return e.u + 2.0 * (e.v - e.u) * sum;
}

Pi2Cache::Pi2Cache(double x_l, double x_r, int Nc) : xl_(x_l), xr_(x_r), nc_(Nc) {}

const PainleveSolution& Pi2Cache::at(double T) {
  const PainleveSolution* warm = nullptr;
  double best = 1e300;
  for (const auto& s : sols_) {
    double d = std::abs(s->T - T);
    if (d < 1e-12) return *s;
    if (d < best) {
      best = d;
      warm = s.get();
    }
  }
  sols_.push_back(std::make_unique<PainleveSolution>(solve_pi2(T, xl_, xr_, nc_, warm)));
  return *sols_.back();
}

CatastropheFrame catastrophe_frame(double x, double t, double eps, const CatastrophePoint& cp,
                                   const PainleveSolution& pi2) {
  CatastropheFrame f;
  f.cp = cp;
  double tt = t - cp.tc;
  f.X = (x - cp.xc - 6.0 * cp.uc * tt) / (std::pow(cp.k, 1.0 / 7.0) * std::pow(eps, 6.0 / 7.0));
  f.T = tt / (std::pow(cp.k, 3.0 / 7.0) * std::pow(eps, 4.0 / 7.0));
  if (f.X < pi2.grid.a || f.X > pi2.grid.b)
    throw std::domain_error("catastrophe_frame: X outside the solved window");
  f.U = pi2.value(f.X);
  f.UX = pi2.deriv(f.X);
  f.UXX = barycentric_eval(pi2.qpp, f.X);
  f.UXXX = barycentric_eval(pi2.qppp, f.X);
  f.Q = pi2_Q(pi2, f.X);
  return f;
}

double catastrophe_approx(double x, double t, double eps, const CatastrophePoint& cp,
                          Pi2Cache& pi2, CatastropheOrder order, const InitialDataProfile& p) {
  double tt = t - cp.tc;
  double T = tt / (std::pow(cp.k, 3.0 / 7.0) * std::pow(eps, 4.0 / 7.0));
  const PainleveSolution& sol = pi2.at(T);
  CatastropheFrame f = catastrophe_frame(x, t, eps, cp, sol);
  double u = cp.uc + std::pow(eps / cp.k, 2.0 / 7.0) * f.U;
  if (order == CatastropheOrder::four_sevenths) {
    double fl3 = p.fL(cp.uc, 3);
    double fl4 = p.fL(cp.uc, 4);
    double brack = f.Q * f.UX + 2.0 * f.UXX + 4.0 * f.U * f.U + 15.0 * f.T -
                   90.0 * f.T * f.T * f.UX - 3.0 * f.X * f.U * f.UX - 0.5 * f.X * f.UXXX;
    u -= std::pow(eps / cp.k, 4.0 / 7.0) * fl4 / (63.0 * fl3) * brack;
  }
  return u;
}

// --- cubic-profile limit shapes ---------------------------------------------

namespace {

const double kSLeft = -12.0 * std::sqrt(3.0);         // leading-edge similarity value
const double kSRight = 4.0 * std::sqrt(15.0) / 9.0;   // trailing-edge similarity value

// g(z) = 6 z - z^3 restricted to a monotone decreasing piece; bisection on a
// verified bracket followed by a Newton polish.
double cubic_root(double s, double lo, double hi) {
  auto g = [](double z) { return 6.0 * z - z * z * z; };
  double glo = g(lo);
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((g(mid) - s) * (glo - s) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 6; ++it) {
    double dg = 6.0 - 3.0 * z * z;
    if (std::abs(dg) < 1e-12) break;
    z -= (g(z) - s) / dg;
  }
  return z;
}

}  // namespace

double connection_algebraic(double x, double t, const CatastrophePoint& cp) {
  double tt = t - cp.tc;
  if (tt == 0.0) throw std::domain_error("connection_algebraic: t equals the breaking time");
  double xs = x - cp.xc - 6.0 * cp.uc * tt;
  double sqk = std::sqrt(cp.k);
  if (tt < 0.0) {
    // pre-break: s = -6 z - z^3 is globally monotone decreasing
    double sv = sqk * xs / std::pow(-tt, 1.5);
    double A = std::cbrt(std::abs(sv)) + 3.0;
    auto g = [](double z) { return -6.0 * z - z * z * z; };
    double lo = -A, hi = A;
    double glo = g(lo);
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      if ((g(mid) - sv) * (glo - sv) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 6; ++it) z -= (g(z) - sv) / (-6.0 - 3.0 * z * z);
    return cp.uc + std::sqrt(-tt / cp.k) * z;
  }
  double sv = sqk * xs / std::pow(tt, 1.5);
  double z;
  if (sv <= kSLeft) {
    z = cubic_root(sv, 2.0 * std::sqrt(3.0), std::cbrt(-sv) + 3.0);
  } else if (sv >= kSRight) {
    z = cubic_root(sv, -std::cbrt(std::abs(sv)) - 3.0, -2.0 / 3.0 * std::sqrt(15.0));
  } else {
    throw std::domain_error("connection_algebraic: inside the modulated band");
  }
  return cp.uc + std::sqrt(tt / cp.k) * z;
}

namespace {

// Self-similar branch system for the cubic profile:
//   (1/5) [(sum b)^2 + 2 sum b^2] = 6
//   (2/15) [(sum b)^3 - 4 sum b^3] = s
//   int_{b3}^{b2} sqrt((b1-xi)(b2-xi)(xi-b3)) (xi + sum b / 2) dxi = 0
std::array<double, 3> selfsim_F(const std::array<double, 3>& b, double s) {
  double b1 = b[0], b2 = b[1], b3 = b[2];
  double S = b1 + b2 + b3;
  double S2 = b1 * b1 + b2 * b2 + b3 * b3;
  double S3 = b1 * b1 * b1 + b2 * b2 * b2 + b3 * b3 * b3;
  std::array<double, 3> F;
  F[0] = 0.2 * (S * S + 2.0 * S2) - 6.0;
  F[1] = 2.0 / 15.0 * (S * S * S - 4.0 * S3) - s;
  // xi = b3 + (b2 - b3) sin^2(phi) absorbs both interior square roots
  const GaussLegendre& gl = gl_rule(64);
  double d = b2 - b3;
  double acc = 0.0;
  for (size_t j = 0; j < gl.x.size(); ++j) {
    double phi = 0.25 * kPi * (gl.x[j] + 1.0);
    double w = 0.25 * kPi * gl.w[j];
    double sn = std::sin(phi), cs = std::cos(phi);
    double xi = b3 + d * sn * sn;
    double rad = b1 - xi;
    if (rad < 0.0) rad = 0.0;
    acc += w * std::sqrt(rad) * (xi + 0.5 * S) * sn * sn * cs * cs;
  }
  F[2] = 2.0 * d * d * acc;
  return F;
}

std::array<double, 3> selfsim_newton(std::array<double, 3> b, double s) {
  auto resid = [s](const Eigen::VectorXd& v) {
    Eigen::VectorXd F(3);
    std::array<double, 3> bb = {v[0], v[1], v[2]};
    if (!(bb[0] > bb[1] && bb[1] > bb[2])) {
      double pen = 1e6 * (1.0 + std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]));
      F << pen, pen, pen;
      return F;
    }
    auto Fa = selfsim_F(bb, s);
    F << Fa[0], Fa[1], Fa[2];
    return F;
  };
  Eigen::VectorXd x0(3);
  x0 << b[0], b[1], b[2];
  Eigen::VectorXd sol = newton_solve(resid, {}, x0, 1e-13, 50, true);
  return {sol[0], sol[1], sol[2]};
}

}  // namespace

std::array<double, 3> connection_selfsimilar(double s) {
  if (!(s > kSLeft && s < kSRight))
    throw std::domain_error("connection_selfsimilar: s outside the modulated band");
  // continuation seed: keep the last converged point per thread
  thread_local bool have_last = false;
  thread_local double last_s = 0.0;
  thread_local std::array<double, 3> last_b;
  if (have_last && std::abs(s - last_s) < 0.2) {
    try {
      std::array<double, 3> b = selfsim_newton(last_b, s);
      last_s = s;
      last_b = b;
      return b;
    } catch (const newton_error&) {
      // fall through to the full continuation walk
    }
  }
  double s0 = kSLeft + 0.4;
  double r3 = std::sqrt(3.0);
  std::array<double, 3> b = selfsim_newton({2.0 * r3, -0.5 * r3 + 0.25, -0.5 * r3 - 0.25}, s0);
  double cur = s0;
  double step = 0.25;
  while (std::abs(cur - s) > 1e-14) {
    double next = cur + std::clamp(s - cur, -step, step);
    // linear seeds suffice; the walk shrinks the step on failure
    try {
      b = selfsim_newton(b, next);
      cur = next;
      step = std::min(step * 1.5, 0.25);
    } catch (const newton_error& e) {
      step *= 0.5;
      if (step < 1e-7)
        throw continuation_error("connection_selfsimilar: continuation stalled", -1,
                                 e.last_residual);
    }
  }
  have_last = true;
  last_s = s;
  last_b = b;
  return b;
}

double q_cubic(double b1, double b2, double b3) {
  const GaussLegendre& gl = gl_rule(64);
  const int n = 64;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double phi = (2.0 * i + 1.0) * kPi / (2.0 * n);
    double c2 = std::cos(0.5 * phi), s2v = std::sin(0.5 * phi);
    double ci = c2 * c2 * b1 + s2v * s2v * b2;
    for (size_t j = 0; j < gl.x.size(); ++j) {
      double psi = 0.25 * kPi * (gl.x[j] + 1.0);
      double w = 0.25 * kPi * gl.w[j] * std::cos(psi);
      double sj = std::sin(psi);
      double arg = (1.0 - sj * sj) * ci + sj * sj * b3;
      acc += w * (-arg * arg * arg);
    }
  }
  return acc / n;
}

double connection_elliptic(double x, double t, double eps, const CatastrophePoint& cp) {
  double tt = t - cp.tc;
  if (tt <= 0.0) throw std::domain_error("connection_elliptic: requires t past the breaking time");
  double sv = std::sqrt(cp.k) * (x - cp.xc - 6.0 * cp.uc * tt) / std::pow(tt, 1.5);
  std::array<double, 3> b = connection_selfsimilar(sv);
  double b1 = b[0], b2 = b[1], b3 = b[2];
  double m2 = (b2 - b3) / (b1 - b3);
  double sm = std::sqrt(std::min(std::max(m2, 0.0), 1.0 - 1e-16));
  double K = elliptic_K(sm);
  double imT = elliptic_K(std::sqrt(1.0 - sm * sm)) / K;
  double alpha = elliptic_alpha(b1, b2, b3);
  double qc = q_cubic(b1, b2, b3);
  double Omega = std::pow(tt, 1.75) * std::sqrt(b1 - b3) /
                 (2.0 * eps * K * std::pow(cp.k, 0.75)) * (sv - 2.0 * (b1 + b2 + b3) - qc);
  return cp.uc + std::sqrt(tt / cp.k) *
                     (b1 + b2 + b3 + 2.0 * alpha +
                      (b1 - b3) / (2.0 * K * K) * theta3_ddlog(Omega, imT));
}

double connection_pii(double x, double t, double eps, const CatastrophePoint& cp,
                      const PainleveSolution& hm) {
  double tt = t - cp.tc;
  if (tt <= 0.0) throw std::domain_error("connection_pii: requires t past the breaking time");
  const double c0 = std::pow(2.0, 7.0 / 6.0) * std::pow(3.0, 1.0 / 12.0) / std::pow(5.0, 1.0 / 6.0);
  const double c1 = std::sqrt(2.5 * std::sqrt(3.0));
  double xs = x - cp.xc - 6.0 * cp.uc * tt;
  // xi = -(X + 12 sqrt(3) T^{3/2}) / (c0 c1 T^{1/3}) in the catastrophe
  // variables; it coincides with the Painleve II argument of the leading-edge
  // expansion for cubic data
  double xi = -(xs + 12.0 * std::sqrt(3.0) * std::pow(tt, 1.5) / std::sqrt(cp.k)) /
              (std::pow(eps, 2.0 / 3.0) * c0 * c1 * std::pow(tt, 1.0 / 3.0));
  double T = tt / (std::pow(cp.k, 3.0 / 7.0) * std::pow(eps, 4.0 / 7.0));
  // the constant phase equals the cubic leading-edge phase integral
  // -(64/7) c1^3 (t - tc)^{7/4} k^{-3/4}; the xi term restores its linear
  // x-dependence 2 sqrt(u - v) (x - x^-)
  double omega = 64.0 / 7.0 * c1 * c1 * c1 + 2.0 * c1 * c1 * c0 * xi * std::pow(T, -7.0 / 6.0);
  double phase = std::pow(tt, 1.75) / (eps * std::pow(cp.k, 0.75)) * omega;
  double q = hm_value(hm, xi, 0);
  return cp.uc + 2.0 * std::sqrt(3.0) * std::sqrt(tt / cp.k) -
         4.0 * q * std::cbrt(eps / cp.k) / (c0 * std::pow(tt / cp.k, 1.0 / 12.0)) * std::cos(phase);
}

double connection_soliton(double x, double t, double eps, const CatastrophePoint& cp) {
  double tt = t - cp.tc;
  if (tt <= 0.0) throw std::domain_error("connection_soliton: requires t past the breaking time");
  double T = tt / (std::pow(cp.k, 3.0 / 7.0) * std::pow(eps, 4.0 / 7.0));
  if (T <= 1.0) throw std::domain_error("connection_soliton: below the soliton-scale crossover");
  const double c0 = std::sqrt(7.0 / 6.0) * std::pow(15.0, 0.25);
  // distance from the cubic trailing edge x^+ = xc + 6 uc (t-tc)
  //                                            + (4 sqrt(15) / 9) (t-tc)^{3/2} / sqrt(k)
  double xs = x - cp.xc - 6.0 * cp.uc * tt -
              4.0 / 9.0 * std::sqrt(15.0 / cp.k) * std::pow(tt, 1.5);
  double lnT = std::log(T);
  // xi = -(8/7) c0 (X - (4/9) sqrt(15) T^{3/2}) / (T^{-1/4} log T); with this
  // scale X_j matches the trailing-edge soliton phase for cubic data
  double xi = -(8.0 / 7.0) * c0 * std::pow(tt / cp.k, 0.25) * xs / (eps * lnT);
  double lgam = std::log(16.0 * std::pow(c0, 2.5) / std::pow(15.0, 0.25));
  int jmax = std::min(150, std::max(10, static_cast<int>(std::ceil(std::abs(xi))) + 2));
  double sum = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    double Xj = -(7.0 / 8.0) * (0.5 - xi + j) * lnT -
                std::log(std::sqrt(2.0 * kPi) * hermite_norm(j)) - (j + 0.5) * lgam;
    sum += sech2(Xj);
  }
  return cp.uc - 2.0 * std::sqrt(5.0 / 3.0) * std::sqrt(tt / cp.k) +
         2.0 * c0 * c0 * std::sqrt(tt / cp.k) * sum;
}

void write_approx_csv(const std::string& path, const std::string& formula, double t, double eps,
                      const std::vector<double>& x, const std::vector<double>& u) {
  if (x.size() != u.size()) throw std::invalid_argument("write_approx_csv: length mismatch");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_approx_csv: cannot open " + path);
  std::fprintf(f, "# approx formula=%s t=%.17g epsilon=%.17g\n", formula.c_str(), t, eps);
  std::fprintf(f, "x,u\n");
  for (size_t i = 0; i < x.size(); ++i) std::fprintf(f, "%.17g,%.17g\n", x[i], u[i]);
  std::fclose(f);
}

}  // namespace kdvlim
