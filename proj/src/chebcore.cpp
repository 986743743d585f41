#include "kdvlim/chebcore.hpp"

#include <cmath>

namespace kdvlim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ChebGrid ChebGrid::make(int Nc, double a, double b) {
  if (Nc < 1) throw std::domain_error("ChebGrid: Nc must be >= 1");
  if (!(a < b)) throw std::domain_error("ChebGrid: need a < b");
  ChebGrid g;
  g.Nc = Nc;
  g.a = a;
  g.b = b;
  g.lnodes.resize(Nc + 1);
  g.nodes.resize(Nc + 1);
  for (int j = 0; j <= Nc; ++j) {
    double l = std::cos(kPi * j / Nc);
    if (j == 0) l = 1.0;
    if (j == Nc) l = -1.0;
    if (2 * j == Nc) l = 0.0;
    g.lnodes[j] = l;
    g.nodes[j] = 0.5 * (a + b) + 0.5 * (b - a) * l;
  }
  return g;
}

std::vector<double> cheb_vals2coeffs(const std::vector<double>& v) {
  int Nc = static_cast<int>(v.size()) - 1;
  std::vector<double> c(Nc + 1, 0.0);
  for (int k = 0; k <= Nc; ++k) {
    double s = 0.5 * (v[0] + ((Nc * k) % 2 ? -v[Nc] : v[Nc]));
    for (int j = 1; j < Nc; ++j) s += v[j] * std::cos(kPi * j * k / Nc);
    c[k] = 2.0 * s / Nc;
  }
  c[0] *= 0.5;
  c[Nc] *= 0.5;
  return c;
}

std::vector<double> cheb_coeffs2vals(const std::vector<double>& c) {
  int Nc = static_cast<int>(c.size()) - 1;
  std::vector<double> v(Nc + 1, 0.0);
  for (int j = 0; j <= Nc; ++j) {
    double s = 0.0;
    for (int k = 0; k <= Nc; ++k) s += c[k] * std::cos(kPi * j * k / Nc);
    v[j] = s;
  }
  return v;
}

ChebFunction ChebFunction::from_values(const ChebGrid& g, std::vector<double> v) {
  if (static_cast<int>(v.size()) != g.Nc + 1)
    throw std::domain_error("ChebFunction: value count must match grid");
  ChebFunction f;
  f.grid = g;
  f.values = std::move(v);
  f.coeffs = cheb_vals2coeffs(f.values);
  return f;
}

double ChebFunction::tail_indicator() const {
  double mx = 0.0;
  for (double c : coeffs) mx = std::fmax(mx, std::fabs(c));
  if (mx == 0.0) return 0.0;
  int n = static_cast<int>(coeffs.size());
  double tail = std::fabs(coeffs[n - 1]);
  if (n >= 2) tail = std::fmax(tail, std::fabs(coeffs[n - 2]));
  return tail / mx;
}

Eigen::MatrixXd diff_matrix(const ChebGrid& g, int order) {
  if (order < 1 || order > 4) throw std::domain_error("diff_matrix: order must be 1..4");
  int n = g.Nc + 1;
  if (g.Nc < order + 1) throw std::domain_error("diff_matrix: Nc too small for order");
  // Barycentric weights on the unmapped nodes.
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = (j % 2 ? -1.0 : 1.0);
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= order; ++k) {
    Eigen::MatrixXd Dk(n, n);
    for (int i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double val = k * (w[j] / w[i] * D(i, i) - D(i, j)) / (g.lnodes[i] - g.lnodes[j]);
        Dk(i, j) = val;
        rowsum += val;
      }
      Dk(i, i) = -rowsum;
    }
    D = Dk;
  }
  double scale = std::pow(2.0 / (g.b - g.a), order);
  return scale * D;
}

double barycentric_eval(const ChebFunction& f, double x) {
  const ChebGrid& g = f.grid;
  double span = g.b - g.a;
  if (x < g.a - 1e-12 * span || x > g.b + 1e-12 * span)
    throw std::domain_error("barycentric_eval: x outside interpolation domain");
  int n = g.Nc + 1;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = x - g.nodes[j];
    if (std::fabs(d) < 1e-15 * (1.0 + std::fabs(x))) return f.values[j];
    double wj = (j % 2 ? -1.0 : 1.0);
    if (j == 0 || j == n - 1) wj *= 0.5;
    double t = wj / d;
    num += t * f.values[j];
    den += t;
  }
  return num / den;
}

Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    Eigen::VectorXd x0, double tol, int maxit, bool damped) {
  if (tol <= 0.0) throw std::domain_error("newton_solve: tol must be positive");
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd r = residual(x);
  if (r.size() != x.size()) throw std::domain_error("newton_solve: dimension mismatch");
  double rn = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < maxit; ++it) {
    if (rn < tol) return x;
    Eigen::MatrixXd J;
    if (jacobian) {
      J = jacobian(x);
    } else {
      int n = static_cast<int>(x.size());
      J.resize(n, n);
      for (int j = 0; j < n; ++j) {
        double h = 1e-7 * (1.0 + std::fabs(x[j]));
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd dx = lu.solve(r);
    if (!dx.allFinite())
      throw newton_error("newton_solve: singular Jacobian", rn);
    if (damped) {
      double lam = 1.0;
      for (int half = 0; half <= 10; ++half) {
        Eigen::VectorXd xn = x - lam * dx;
        Eigen::VectorXd rnw = residual(xn);
        double nn = rnw.lpNorm<Eigen::Infinity>();
        if (nn < rn || half == 10) {
          x = xn;
          r = rnw;
          rn = nn;
          break;
        }
        lam *= 0.5;
      }
    } else {
      x -= dx;
      r = residual(x);
      rn = r.lpNorm<Eigen::Infinity>();
    }
    if (!std::isfinite(rn)) throw newton_error("newton_solve: residual diverged", rn);
  }
  if (rn < tol) return x;
  throw newton_error("newton_solve: no convergence", rn);
}

Eigen::VectorXd nelder_mead_min(const std::function<double(const Eigen::VectorXd&)>& f,
                                Eigen::VectorXd x0, double tol, int max_evals) {
  int n = static_cast<int>(x0.size());
  double f0 = f(x0);
  if (!std::isfinite(f0)) throw std::domain_error("nelder_mead_min: f not finite at x0");
  int evals = 1;
  // Initial simplex: perturb each coordinate.
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1, f0);
  for (int i = 0; i < n; ++i) {
    double h = (x0[i] != 0.0) ? 0.05 * std::fabs(x0[i]) : 0.00025;
    xs[i + 1][i] += h;
    fs[i + 1] = f(xs[i + 1]);
    ++evals;
  }
  auto order = [&]() {
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (fs[j] < fs[i]) {
          std::swap(fs[i], fs[j]);
          std::swap(xs[i], xs[j]);
        }
  };
  while (evals < max_evals) {
    order();
    double diam = 0.0;
    for (int i = 1; i <= n; ++i) diam = std::fmax(diam, (xs[i] - xs[0]).lpNorm<Eigen::Infinity>());
    if (diam < tol) return xs[0];
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;
    Eigen::VectorXd xr = centroid + (centroid - xs[n]);
    double fr = f(xr);
    ++evals;
    if (fr < fs[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[n]);
      double fe = f(xe);
      ++evals;
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (xs[n] - centroid);
      double fc = f(xc);
      ++evals;
      if (fc < fs[n]) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
          ++evals;
        }
      }
    }
  }
  order();
  throw nm_budget_error("nelder_mead_min: evaluation budget exhausted", xs[0], fs[0]);
}

}  // namespace kdvlim
