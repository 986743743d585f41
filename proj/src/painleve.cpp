#include "kdvlim/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "kdvlim/specfun.hpp"

namespace kdvlim {

namespace {

// Hastings-McLeod left-tail coefficients: q = sqrt(sigma/2) sum a_n sigma^{-3n}
// with a_{n+1} = ((9n^2 - 1/4) a_n - R_n)/2, R_n the cubic convolution at
// order n+1 restricted to indices <= n.
std::vector<double> hm_left_coeffs(int order) {
  std::vector<long double> a = {1.0L};
  for (int n = 0; n < order; ++n) {
    long double Rn = 0.0L;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        int k = n + 1 - i - j;
        if (k >= 0 && k <= n) Rn += a[i] * a[j] * a[k];
      }
    a.push_back(((9.0L * n * n - 0.25L) * a[n] - Rn) / 2.0L);
  }
  return std::vector<double>(a.begin(), a.end());
}

// Fourth-order-equation tail coefficients on the rho^{-1/3} lattice.
// U = sgn rho^{1/3} S(rho), S = sum d_k rho^{-k/3}; substituting into
// X = 6TU - [U^3 + U_X^2/2 + U U_XX + U_XXXX/10] and matching powers of
// rho^{(3-m)/3} determines d_m linearly once d_0..d_{m-1} are known.
std::vector<long double> ser_mul(const std::vector<long double>& A,
                                 const std::vector<long double>& B, int K) {
  std::vector<long double> C(K + 1, 0.0L);
  for (int i = 0; i <= K; ++i) {
    if (A[i] == 0.0L) continue;
    for (int j = 0; j + i <= K; ++j)
      if (B[j] != 0.0L) C[i + j] += A[i] * B[j];
  }
  return C;
}

std::vector<long double> pi2_build_F(const std::vector<long double>& d, long double T,
                                     long double sgn, long double eta, int K) {
  std::vector<long double> U(K + 1);
  for (int n = 0; n <= K; ++n) U[n] = sgn * d[n];
  auto ddX = [&](const std::vector<long double>& A, int p0) {
    std::vector<long double> B(K + 1, 0.0L);
    for (int n = 0; n <= K; ++n) B[n] = eta * A[n] * (static_cast<long double>(p0) - n) / 3.0L;
    return std::make_pair(B, p0 - 3);
  };
  auto [UX, pUX] = ddX(U, 1);
  auto [UXX, pUXX] = ddX(UX, pUX);
  auto [UXXX_, pUXXX] = ddX(UXX, pUXX);
  auto [UXXXX, pUXXXX] = ddX(UXXX_, pUXXX);
  (void)pUXXX;
  std::vector<long double> F(K + 1, 0.0L);
  auto add = [&](const std::vector<long double>& A, int pA, long double fac) {
    int off = 3 - pA;
    for (int n = 0; n <= K; ++n) {
      int m = n + off;
      if (m >= 0 && m <= K) F[m] += fac * A[n];
    }
  };
  add(U, 1, 6.0L * T);
  add(ser_mul(ser_mul(U, U, K), U, K), 3, -1.0L);
  add(ser_mul(UX, UX, K), 2 * pUX, -0.5L);
  add(ser_mul(U, UXX, K), 1 + pUXX, -1.0L);
  add(UXXXX, pUXXXX, -0.1L);
  F[0] += (eta > 0 ? -1.0L : 1.0L);  // -X = -eta rho at lattice index 0
  return F;
}

std::vector<double> pi2_coeffs(double T, int side, int K) {
  long double sgn = side > 0 ? -1.0L : 1.0L;
  long double eta = side > 0 ? 1.0L : -1.0L;
  std::vector<long double> d(K + 1, 0.0L);
  d[0] = 1.0L;
  for (int m = 1; m <= K; ++m) {
    std::vector<long double> F = pi2_build_F(d, T, sgn, eta, K);
    long double g = F[m];
    d[m] = 1.0L;
    std::vector<long double> F2 = pi2_build_F(d, T, sgn, eta, K);
    long double slope = F2[m] - g;
    d[m] = -g / slope;
  }
  return std::vector<double>(d.begin(), d.end());
}

// Terms of the series at a given point; used for value, derivative, and the
// smallest-term truncation shared by both.
int first_min_cut(const std::vector<double>& absterms) {
  int n = static_cast<int>(absterms.size());
  for (int i = 3; i < n; ++i)
    if (absterms[i] > absterms[i - 1] && absterms[i - 1] > 0.0) return i - 1;
  return n - 1;
}

}  // namespace

int AsymptoticTail::truncation_index(double x) const {
  if (eq == Equation::pii && side > 0) return 0;
  std::vector<double> at(coeffs.size());
  if (eq == Equation::pii) {
    double sig = -x;
    for (std::size_t n = 0; n < coeffs.size(); ++n)
      at[n] = std::fabs(coeffs[n] * std::pow(sig, -3.0 * static_cast<double>(n)));
  } else {
    double rho = std::fabs(x);
    for (std::size_t n = 0; n < coeffs.size(); ++n)
      at[n] = std::fabs(coeffs[n] * std::pow(rho, (1.0 - static_cast<double>(n)) / 3.0));
  }
  return first_min_cut(at);
}

double AsymptoticTail::eval(double x) const {
  if (eq == Equation::pii) {
    if (side > 0) return airy_Ai(x);
    double sig = -x;
    if (!(sig > 0.0)) throw std::domain_error("tail eval: left series needs s < 0");
    int cut = truncation_index(x);
    double sum = 0.0;
    for (int n = cut; n >= 0; --n) sum += coeffs[n] * std::pow(sig, -3.0 * n);
    return std::sqrt(sig / 2.0) * sum;
  }
  double rho = std::fabs(x);
  if (!(rho > 0.0)) throw std::domain_error("tail eval: needs |X| > 0");
  if ((x > 0.0) != (side > 0)) throw std::domain_error("tail eval: wrong side");
  double sgn = side > 0 ? -1.0 : 1.0;
  int cut = truncation_index(x);
  double sum = 0.0;
  for (int n = cut; n >= 0; --n) sum += coeffs[n] * std::pow(rho, (1.0 - n) / 3.0);
  return sgn * sum;
}

double AsymptoticTail::eval_deriv(double x) const {
  if (eq == Equation::pii) {
    if (side > 0) return airy_Aip(x);
    double sig = -x;
    if (!(sig > 0.0)) throw std::domain_error("tail eval: left series needs s < 0");
    int cut = truncation_index(x);
    double sum = 0.0;  // q = sum a_n / sqrt(2) sigma^{1/2 - 3n}; d/ds = -d/dsigma
    for (int n = cut; n >= 0; --n)
      sum += coeffs[n] * (0.5 - 3.0 * n) * std::pow(sig, -0.5 - 3.0 * n);
    return -sum / std::sqrt(2.0);
  }
  double rho = std::fabs(x);
  double sgn = side > 0 ? -1.0 : 1.0;
  double eta = side > 0 ? 1.0 : -1.0;  // d/dX = eta d/drho
  int cut = truncation_index(x);
  double sum = 0.0;
  for (int n = cut; n >= 0; --n)
    sum += coeffs[n] * ((1.0 - n) / 3.0) * std::pow(rho, (1.0 - n) / 3.0 - 1.0);
  return sgn * eta * sum;
}

AsymptoticTail tail_series_pii(int side, int order) {
  AsymptoticTail t;
  t.eq = AsymptoticTail::Equation::pii;
  t.side = side;
  t.coeffs = side > 0 ? std::vector<double>{1.0} : hm_left_coeffs(order);
  return t;
}

AsymptoticTail tail_series_pi2(double T, int side, int order) {
  AsymptoticTail t;
  t.eq = AsymptoticTail::Equation::pi2;
  t.side = side;
  t.T = T;
  t.coeffs = pi2_coeffs(T, side, order);
  return t;
}

double PainleveSolution::value(double x) const { return barycentric_eval(q, x); }
double PainleveSolution::deriv(double x) const { return barycentric_eval(qp, x); }

PainleveSolution solve_hastings_mcleod(double x_l, double x_r, int Nc) {
  if (!(x_l < -6.0) || !(x_r > 6.0)) throw std::domain_error("solve_hastings_mcleod: domain too small");
  if (Nc < 128) throw std::domain_error("solve_hastings_mcleod: Nc must be >= 128");
  ChebGrid g = ChebGrid::make(Nc, x_l, x_r);
  Eigen::MatrixXd D = diff_matrix(g, 1);
  int M = Nc + 1;
  AsymptoticTail tl = tail_series_pii(-1);
  double qR = airy_Ai(x_r), qL = tl.eval(x_l);

  Eigen::VectorXd z(2 * M);
  for (int j = 0; j < M; ++j) {
    double s = g.nodes[j];
    double w = 0.5 * (1.0 + std::tanh(s));
    z[j] = (1.0 - w) * tl.eval(std::fmin(s, -2.0)) + w * airy_Ai(s);
  }
  z.segment(M, M) = D * z.segment(0, M);

  auto Ffun = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd q = y.segment(0, M), r = y.segment(M, M);
    Eigen::VectorXd F(2 * M);
    F.segment(0, M) = D * q - r;
    F[0] = q[0] - qR;     // node 0 sits at x_r
    F[Nc] = q[Nc] - qL;   // node Nc sits at x_l
    Eigen::VectorXd rhs(M);
    for (int j = 0; j < M; ++j) rhs[j] = g.nodes[j] * q[j] + 2.0 * q[j] * q[j] * q[j];
    F.segment(M, M) = D * r - rhs;
    return F;
  };

  Eigen::MatrixXd J(2 * M, 2 * M);
  Eigen::VectorXd F = Ffun(z);
  double fn = F.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 60; ++it) {
    if (fn < 1e-13) break;
    J.setZero();
    J.block(0, 0, M, M) = D;
    J.block(0, M, M, M) = -Eigen::MatrixXd::Identity(M, M);
    J.row(0).setZero();
    J(0, 0) = 1.0;
    J.row(Nc).setZero();
    J(Nc, Nc) = 1.0;
    for (int j = 0; j < M; ++j) J(M + j, j) = -(g.nodes[j] + 6.0 * z[j] * z[j]);
    J.block(M, M, M, M) = D;
    Eigen::VectorXd dz = J.partialPivLu().solve(-F);
    double lam = 1.0;
    Eigen::VectorXd znew;
    double fnew = 0.0;
    for (int h = 0; h <= 10; ++h) {
      znew = z + lam * dz;
      fnew = Ffun(znew).lpNorm<Eigen::Infinity>();
      if (fnew < fn || h == 10) break;
      lam *= 0.5;
    }
    if (fnew >= fn && fn < 1e-10) break;  // stalled at the roundoff floor
    z = znew;
    F = Ffun(z);
    fn = F.lpNorm<Eigen::Infinity>();
  }
  if (!(fn < 1e-10)) throw newton_error("solve_hastings_mcleod: Newton did not converge", fn);

  PainleveSolution sol;
  sol.fourth_order = false;
  sol.grid = g;
  std::vector<double> qv(M), rv(M);
  for (int j = 0; j < M; ++j) {
    qv[j] = z[j];
    rv[j] = z[M + j];
    if (!(qv[j] > 0.0))
      throw std::runtime_error("solve_hastings_mcleod: captured a non-positive branch");
  }
  sol.q = ChebFunction::from_values(g, qv);
  sol.qp = ChebFunction::from_values(g, rv);
  double res = 0.0;
  for (int j = 1; j < Nc; ++j) res = std::fmax(res, std::fabs(F[j]));
  for (int j = M + 1; j < M + Nc; ++j) res = std::fmax(res, std::fabs(F[j]));
  sol.residual_norm = res;
  return sol;
}

std::array<double, 3> hm_auxiliary(const PainleveSolution& sol, double s) {
  if (sol.fourth_order) throw std::domain_error("hm_auxiliary: not a second-Painleve solution");
  double q = sol.value(s), qp = sol.deriv(s);
  return {q, qp, -q * q * q * q - s * q * q + qp * qp};
}

PainleveSolution solve_pi2(double T, double x_l, double x_r, int Nc,
                           const PainleveSolution* warm) {
  if (!(x_l <= -30.0) || !(x_r >= 30.0)) throw std::domain_error("solve_pi2: domain too small");
  if (Nc < 256) throw std::domain_error("solve_pi2: Nc must be >= 256");
  ChebGrid g = ChebGrid::make(Nc, x_l, x_r);
  Eigen::MatrixXd D = diff_matrix(g, 1);
  int M = Nc + 1;
  AsymptoticTail tl = tail_series_pi2(T, -1), tr = tail_series_pi2(T, +1);
  double UL = tl.eval(x_l), ULp = tl.eval_deriv(x_l);
  double UR = tr.eval(x_r), URp = tr.eval_deriv(x_r);

  Eigen::VectorXd z(4 * M);
  if (warm && warm->fourth_order && warm->grid.Nc == Nc && warm->grid.a == g.a &&
      warm->grid.b == g.b) {
    for (int j = 0; j < M; ++j) {
      z[j] = warm->q.values[j];
      z[M + j] = warm->qp.values[j];
      z[2 * M + j] = warm->qpp.values[j];
      z[3 * M + j] = warm->qppp.values[j];
    }
  } else {
    for (int j = 0; j < M; ++j) {
      double x = g.nodes[j];
      z[j] = -x / std::cbrt(x * x + 20.0);
    }
    z.segment(M, M) = D * z.segment(0, M);
    z.segment(2 * M, M) = D * z.segment(M, M);
    z.segment(3 * M, M) = D * z.segment(2 * M, M);
  }

  auto Ffun = [&](const Eigen::VectorXd& y, double Tcur) {
    auto U = y.segment(0, M), Y1 = y.segment(M, M), Y2 = y.segment(2 * M, M),
         Y3 = y.segment(3 * M, M);
    Eigen::VectorXd F(4 * M);
    F.segment(0, M) = D * U - Y1;
    F[0] = U[0] - UR;
    F[Nc] = U[Nc] - UL;
    F.segment(M, M) = D * Y1 - Y2;
    F[M] = Y1[0] - URp;
    F[M + Nc] = Y1[Nc] - ULp;
    F.segment(2 * M, M) = D * Y2 - Y3;
    Eigen::VectorXd rhs(M);
    for (int j = 0; j < M; ++j)
      rhs[j] = 10.0 * (6.0 * Tcur * U[j] - U[j] * U[j] * U[j] - 0.5 * Y1[j] * Y1[j] -
                       U[j] * Y2[j] - g.nodes[j]);
    F.segment(3 * M, M) = D * Y3 - rhs;
    return F;
  };

  auto newton = [&](Eigen::VectorXd& y, double Tcur) -> double {
    Eigen::VectorXd F = Ffun(y, Tcur);
    double fn = F.lpNorm<Eigen::Infinity>();
    Eigen::MatrixXd J(4 * M, 4 * M);
    for (int it = 0; it < 40; ++it) {
      if (fn < 5e-10) break;
      J.setZero();
      J.block(0, 0, M, M) = D;
      J.block(0, M, M, M) = -Eigen::MatrixXd::Identity(M, M);
      J.row(0).setZero();
      J(0, 0) = 1.0;
      J.row(Nc).setZero();
      J(Nc, Nc) = 1.0;
      J.block(M, M, M, M) = D;
      J.block(M, 2 * M, M, M) = -Eigen::MatrixXd::Identity(M, M);
      J.row(M).setZero();
      J(M, M) = 1.0;
      J.row(M + Nc).setZero();
      J(M + Nc, M + Nc) = 1.0;
      J.block(2 * M, 2 * M, M, M) = D;
      J.block(2 * M, 3 * M, M, M) = -Eigen::MatrixXd::Identity(M, M);
      for (int j = 0; j < M; ++j) {
        J(3 * M + j, j) = -10.0 * (6.0 * Tcur - 3.0 * y[j] * y[j] - y[2 * M + j]);
        J(3 * M + j, M + j) = 10.0 * y[M + j];
        J(3 * M + j, 2 * M + j) = 10.0 * y[j];
      }
      J.block(3 * M, 3 * M, M, M) = D;
      Eigen::VectorXd dz = J.partialPivLu().solve(-F);
      double lam = 1.0;
      Eigen::VectorXd ynew;
      double fnew = 0.0;
      for (int h = 0; h <= 10; ++h) {
        ynew = y + lam * dz;
        fnew = Ffun(ynew, Tcur).lpNorm<Eigen::Infinity>();
        if (fnew < fn || h == 10) break;
        lam *= 0.5;
      }
      if (fnew >= fn && fn < 1e-8) break;
      y = ynew;
      F = Ffun(y, Tcur);
      fn = F.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(fn)) return fn;
    }
    return fn;
  };

  double fn = newton(z, T);
  if (!(fn < 1e-8) && !warm && T != 0.0) {
    // Continuation from T = 0 in small steps.
    for (int j = 0; j < M; ++j) {
      double x = g.nodes[j];
      z[j] = -x / std::cbrt(x * x + 20.0);
    }
    z.segment(M, M) = D * z.segment(0, M);
    z.segment(2 * M, M) = D * z.segment(M, M);
    z.segment(3 * M, M) = D * z.segment(2 * M, M);
    int steps = static_cast<int>(std::ceil(std::fabs(T) / 0.25));
    for (int k = 0; k <= steps; ++k) {
      double Tk = T * k / steps;
      // Boundary data must track Tk during continuation.
      AsymptoticTail tlk = tail_series_pi2(Tk, -1), trk = tail_series_pi2(Tk, +1);
      UL = tlk.eval(x_l);
      ULp = tlk.eval_deriv(x_l);
      UR = trk.eval(x_r);
      URp = trk.eval_deriv(x_r);
      fn = newton(z, Tk);
      if (!(fn < 1e-6) && k < steps)
        throw newton_error("solve_pi2: continuation failed at T=" + std::to_string(Tk), fn);
    }
  }
  if (!(fn < 1e-8)) throw newton_error("solve_pi2: Newton did not converge", fn);

  PainleveSolution sol;
  sol.fourth_order = true;
  sol.T = T;
  sol.grid = g;
  std::vector<double> uv(M), u1(M), u2(M), u3(M);
  for (int j = 0; j < M; ++j) {
    uv[j] = z[j];
    u1[j] = z[M + j];
    u2[j] = z[2 * M + j];
    u3[j] = z[3 * M + j];
    double bound = 2.0 * std::cbrt(std::fabs(g.nodes[j])) + 5.0;
    if (!std::isfinite(uv[j]) || std::fabs(uv[j]) > bound)
      throw std::runtime_error("solve_pi2: nodal blow-up (pole suspected)");
  }
  sol.q = ChebFunction::from_values(g, uv);
  sol.qp = ChebFunction::from_values(g, u1);
  sol.qpp = ChebFunction::from_values(g, u2);
  sol.qppp = ChebFunction::from_values(g, u3);
  Eigen::VectorXd F = Ffun(z, T);
  double res = 0.0;
  for (int c = 0; c < 4; ++c)
    for (int j = 1; j < Nc; ++j) {
      double rj = std::fabs(F[c * M + j]);
      if (c == 3) rj /= 10.0;  // report the equation in its printed form
      res = std::fmax(res, rj);
    }
  sol.residual_norm = res;
  return sol;
}

double pi2_Q(const PainleveSolution& sol, double X) {
  if (!sol.fourth_order) throw std::domain_error("pi2_Q: needs a fourth-order solution");
  double U = barycentric_eval(sol.q, X);
  double U1 = barycentric_eval(sol.qp, X);
  double U2 = barycentric_eval(sol.qpp, X);
  double U3 = barycentric_eval(sol.qppp, X);
  return 0.1 * U1 * U3 - 0.05 * U2 * U2 + X * U - 3.0 * sol.T * U * U + 0.25 * U * U * U * U +
         0.5 * U * U1 * U1;
}

void write_pii_csv(const std::string& path, const PainleveSolution& sol) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_pii_csv: cannot open " + path);
  std::fprintf(f, "# painleve-ii domain=[%.17g,%.17g] Nc=%d\n", sol.grid.a, sol.grid.b,
               sol.grid.Nc);
  std::fprintf(f, "s,q,qprime,p\n");
  for (int j = sol.grid.Nc; j >= 0; --j) {
    double s = sol.grid.nodes[j], q = sol.q.values[j], qp = sol.qp.values[j];
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", s, q, qp,
                 -q * q * q * q - s * q * q + qp * qp);
  }
  std::fclose(f);
}

void write_pi2_csv(const std::string& path, const PainleveSolution& sol) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_pi2_csv: cannot open " + path);
  std::fprintf(f, "# painleve-i2 T=%.17g domain=[%.17g,%.17g] Nc=%d\n", sol.T, sol.grid.a,
               sol.grid.b, sol.grid.Nc);
  std::fprintf(f, "X,U,UX,UXX,UXXX,Q\n");
  for (int j = sol.grid.Nc; j >= 0; --j)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", sol.grid.nodes[j], sol.q.values[j],
                 sol.qp.values[j], sol.qpp.values[j], sol.qppp.values[j],
                 pi2_Q(sol, sol.grid.nodes[j]));
  std::fclose(f);
}

}  // namespace kdvlim
