#include "kdvlim/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kdvlim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double elliptic_K(double s) {
  if (!(s >= 0.0 && s < 1.0)) throw std::domain_error("elliptic_K: modulus must be in [0,1)");
  double a = 1.0, b = std::sqrt((1.0 - s) * (1.0 + s));
  while (a - b > 1e-17 * a) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (a + b);
}

double elliptic_E(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("elliptic_E: modulus must be in [0,1]");
  if (s == 1.0) return 1.0;
  double a = 1.0, b = std::sqrt((1.0 - s) * (1.0 + s)), c = s;
  double sum = 1.0 - 0.5 * c * c;
  double p2 = 0.5;
  while (std::fabs(c) > 1e-17 * a) {
    c = 0.5 * (a - b);
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    p2 *= 2.0;
    sum -= p2 * 0.5 * c * c;
  }
  return sum * kPi / (a + b);
}

namespace {

// Descending Landen recursion for sn.  Each step shrinks the modulus
// quadratically once it is away from 1; the base case is sn = sin.
double sn_landen(double z, double s) {
  std::vector<double> ks;
  double k = s;
  while (k > 1e-10) {
    double kp = std::sqrt((1.0 - k) * (1.0 + k));
    double k1 = (1.0 - kp) / (1.0 + kp);
    ks.push_back(k1);
    z /= 1.0 + k1;
    k = k1;
    if (ks.size() > 64) throw std::domain_error("jacobi_sn: Landen recursion stalled");
  }
  double sn = std::sin(z);
  for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
    double k1 = *it;
    sn = (1.0 + k1) * sn / (1.0 + k1 * sn * sn);
  }
  return sn;
}

}  // namespace

double jacobi_sn(double z, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw std::domain_error("jacobi_sn: modulus must be in [0,1)");
  if (1.0 - s < 1e-12) return std::tanh(z);
  return sn_landen(z, s);
}

double jacobi_dn(double z, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw std::domain_error("jacobi_dn: modulus must be in [0,1)");
  if (1.0 - s < 1e-12) return 1.0 / std::cosh(z);
  double sn = sn_landen(z, s);
  return std::sqrt(std::fmax(1.0 - s * s * sn * sn, 0.0));
}

namespace {

// Fourier branch, adequate for imtau >= 0.05: value and first two
// z-derivatives of theta3.
void theta3_fourier(double z, double y, double& th, double& d1, double& d2) {
  th = 1.0;
  d1 = 0.0;
  d2 = 0.0;
  for (int n = 1; n < 4000; ++n) {
    double g = std::exp(-kPi * n * n * y);
    double c = std::cos(2.0 * kPi * n * z), s = std::sin(2.0 * kPi * n * z);
    th += 2.0 * g * c;
    d1 += -4.0 * kPi * n * g * s;
    d2 += -8.0 * kPi * kPi * n * n * g * c;
    if (g * (1.0 + 8.0 * kPi * kPi * n * n) < 1e-18) return;
  }
  throw std::runtime_error("theta3: Fourier series did not converge");
}

// Gaussian-comb branch from the modular transformation, used for small
// imtau where the Fourier series converges too slowly:
//   theta3(z; iy) = y^{-1/2} sum_n exp(-pi (n - z)^2 / y).
void theta3_comb(double z, double y, double& th, double& d1, double& d2) {
  double halfwidth = std::sqrt(45.0 * y / kPi);
  int n0 = static_cast<int>(std::floor(z - halfwidth)) - 1;
  int n1 = static_cast<int>(std::ceil(z + halfwidth)) + 1;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int n = n0; n <= n1; ++n) {
    double d = n - z;
    double g = std::exp(-kPi * d * d / y);
    double w = 2.0 * kPi * d / y;
    s0 += g;
    s1 += w * g;
    s2 += (w * w - 2.0 * kPi / y) * g;
  }
  double r = 1.0 / std::sqrt(y);
  th = r * s0;
  d1 = r * s1;
  d2 = r * s2;
}

void theta3_eval(double z, double imtau, double& th, double& d1, double& d2) {
  if (!(imtau > 0.0)) throw std::domain_error("theta3: Im(tau) must be positive");
  if (imtau >= 0.05)
    theta3_fourier(z, imtau, th, d1, d2);
  else
    theta3_comb(z, imtau, th, d1, d2);
}

}  // namespace

double theta3(double z, double imtau) {
  double th, d1, d2;
  theta3_eval(z, imtau, th, d1, d2);
  return th;
}

double theta3_dlog(double z, double imtau) {
  double th, d1, d2;
  theta3_eval(z, imtau, th, d1, d2);
  return d1 / th;
}

double theta3_ddlog(double z, double imtau) {
  double th, d1, d2;
  theta3_eval(z, imtau, th, d1, d2);
  double r = d1 / th;
  return d2 / th - r * r;
}

namespace {

// Maclaurin series of Ai: value and derivative.
void airy_series(double s, double& ai, double& aip) {
  // Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3).
  const double c1 = 0.35502805388781723926;
  const double c2 = 0.25881940379280679841;
  // f = sum s^{3k} prod..., g = sum s^{3k+1} ...; Ai = c1 f - c2 g.
  double f = 1.0, g = s, fp = 0.0, gp = 1.0;
  double tf = 1.0, tg = s;
  for (int k = 1; k < 60; ++k) {
    tf *= s * s * s / ((3.0 * k) * (3.0 * k - 1.0));
    tg *= s * s * s / ((3.0 * k + 1.0) * (3.0 * k));
    f += tf;
    g += tg;
    fp += tf * (3.0 * k) / s;
    gp += tg * (3.0 * k + 1.0) / s;
    if (std::fabs(tf) + std::fabs(tg) < 1e-20 * (std::fabs(f) + std::fabs(g))) break;
  }
  if (s == 0.0) {
    fp = 0.0;
    gp = 1.0;
  }
  ai = c1 * f - c2 * g;
  aip = c1 * fp - c2 * gp;
}

// Asymptotic expansion for large positive s (used for s >= 10 where the
// optimally truncated error is far below 1e-15).
void airy_asym_pos(double s, double& ai, double& aip) {
  double zeta = 2.0 / 3.0 * std::pow(s, 1.5);
  double pre = std::exp(-zeta) / (2.0 * std::sqrt(kPi) * std::pow(s, 0.25));
  double sum = 1.0, sump = 1.0;
  double u = 1.0;
  double term = 1.0, zk = 1.0, sgn = 1.0;
  for (int k = 1; k <= 40; ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
    double v = -u * (6.0 * k + 1.0) / (6.0 * k - 1.0);
    zk /= zeta;
    sgn = -sgn;
    double tk = sgn * u * zk;
    if (std::fabs(tk) > std::fabs(term)) break;  // divergence onset
    term = tk;
    sum += tk;
    sump += sgn * v * zk;
    if (std::fabs(tk) < 1e-18) break;
  }
  ai = pre * sum;
  aip = -std::pow(s, 0.25) * std::exp(-zeta) / (2.0 * std::sqrt(kPi)) * sump;
}

// Taylor stepping for y'' = s y from (s0, y, yp) to s0 + h.
void airy_taylor_step(double& s0, double& y, double& yp, double h) {
  // Coefficients c_k of y(s0 + t): recursion from (s0 + t) y.
  const int order = 26;
  double c[order + 2];
  c[0] = y;
  c[1] = yp;
  for (int k = 0; k + 2 <= order + 1; ++k) {
    double prev = (k >= 1) ? c[k - 1] : 0.0;
    c[k + 2] = (s0 * c[k] + prev) / ((k + 1.0) * (k + 2.0));
  }
  double val = 0.0, dval = 0.0;
  for (int k = order + 1; k >= 1; --k) {
    val = val * h + c[k];
    dval = dval * h + k * c[k];
  }
  val = val * h + c[0];
  y = val;
  yp = dval;
  s0 += h;
}

void airy_eval(double s, double& ai, double& aip) {
  if (s >= 10.0) {
    airy_asym_pos(s, ai, aip);
    return;
  }
  if (std::fabs(s) <= 3.0) {
    airy_series(s, ai, aip);
    return;
  }
  if (s > 3.0) {
    // March downward from s = 10 (contamination by the growing solution
    // decays in this direction).
    double s0 = 10.0, y, yp;
    airy_asym_pos(s0, y, yp);
    while (s0 - s > 1e-14) {
      double h = std::fmax(-0.5, s - s0);
      airy_taylor_step(s0, y, yp, h);
    }
    ai = y;
    aip = yp;
    return;
  }
  // s < -3: march left from -3.
  double s0 = -3.0, y, yp;
  airy_series(s0, y, yp);
  while (s0 - s > 1e-14) {
    double h = std::fmax(-0.5, s - s0);
    airy_taylor_step(s0, y, yp, h);
  }
  ai = y;
  aip = yp;
}

}  // namespace

double airy_Ai(double s) {
  double ai, aip;
  airy_eval(s, ai, aip);
  return ai;
}

double airy_Aip(double s) {
  double ai, aip;
  airy_eval(s, ai, aip);
  return aip;
}

double hermite_norm(int j) {
  if (j < 0 || j > 170) throw std::domain_error("hermite_norm: j must be in [0,170]");
  return std::exp(0.5 * j * std::log(2.0) - 0.25 * std::log(kPi) - 0.5 * std::lgamma(j + 1.0));
}

}  // namespace kdvlim
