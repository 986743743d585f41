#include <doctest.h>
#include <initializer_list>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kdvlim/chebcore.hpp"

using namespace kdvlim;

TEST_SUITE("chebcore") {

TEST_CASE("grid orientation and endpoints") {
  auto g = ChebGrid::make(16, -2.0, 3.0);
  REQUIRE(g.nodes.size() == 17);
  CHECK(g.nodes.front() == doctest::Approx(3.0).epsilon(1e-15));  // node 0 is b
  CHECK(g.nodes.back() == doctest::Approx(-2.0).epsilon(1e-15));  // node Nc is a
  for (std::size_t i = 1; i < g.nodes.size(); ++i) CHECK(g.nodes[i] < g.nodes[i - 1]);
}

TEST_CASE("values-coefficients round trip and smooth decay") {
  auto g = ChebGrid::make(32, -1.0, 2.0);
  std::vector<double> v(g.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(std::sin(g.nodes[i]));
  auto c = cheb_vals2coeffs(v);
  auto v2 = cheb_coeffs2vals(c);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(v2[i]).epsilon(1e-13));
  auto f = ChebFunction::from_values(g, v);
  CHECK(f.tail_indicator() < 1e-12);  // analytic function resolves fully at Nc=32
}

TEST_CASE("barycentric evaluation reproduces the function between nodes") {
  auto g = ChebGrid::make(48, 0.0, 4.0);
  std::vector<double> v(g.nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::cos(2.0 * g.nodes[i]);
  auto f = ChebFunction::from_values(g, v);
  for (double x : {0.0, 0.137, 1.9, 3.41, 4.0})
    CHECK(barycentric_eval(f, x) == doctest::Approx(std::cos(2.0 * x)).epsilon(1e-12));
  CHECK_THROWS(barycentric_eval(f, 4.5));
}

TEST_CASE("differentiation matrices of orders one and two") {
  auto g = ChebGrid::make(40, -1.5, 1.0);
  auto D1 = diff_matrix(g, 1);
  auto D2 = diff_matrix(g, 2);
  int n = static_cast<int>(g.nodes.size());
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::sin(3.0 * g.nodes[i]);
  Eigen::VectorXd d1 = D1 * v, d2 = D2 * v;
  for (int i = 0; i < n; ++i) {
    CHECK(d1[i] == doctest::Approx(3.0 * std::cos(3.0 * g.nodes[i])).epsilon(1e-9));
    CHECK(d2[i] == doctest::Approx(-9.0 * std::sin(3.0 * g.nodes[i])).epsilon(1e-8));
  }
}

TEST_CASE("fourth derivative via the order-4 matrix") {
  auto g = ChebGrid::make(48, -1.0, 1.0);
  auto D4 = diff_matrix(g, 4);
  int n = static_cast<int>(g.nodes.size());
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = std::exp(g.nodes[i]);
  Eigen::VectorXd d4 = D4 * v;
  for (int i = 2; i < n - 2; ++i)
    CHECK(d4[i] == doctest::Approx(std::exp(g.nodes[i])).epsilon(1e-5));
}

TEST_CASE("newton_solve on a two-dimensional root problem") {
  auto resid = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd F(2);
    F << v[0] * v[0] + v[1] * v[1] - 4.0, v[0] - v[1];
    return F;
  };
  Eigen::VectorXd x0(2);
  x0 << 1.0, 2.0;
  Eigen::VectorXd sol = newton_solve(resid, {}, x0, 1e-13, 50, false);
  CHECK(sol[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sol[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // damped line search still converges from a poor seed
  Eigen::VectorXd x1(2);
  x1 << 8.0, 0.5;
  Eigen::VectorXd sol2 = newton_solve(resid, {}, x1, 1e-13, 80, true);
  CHECK(sol2[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("newton_solve reports failure with the last residual") {
  auto resid = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd F(1);
    F << v[0] * v[0] + 1.0;  // no real root
    return F;
  };
  Eigen::VectorXd x0(1);
  x0 << 0.7;
  bool threw = false;
  try {
    newton_solve(resid, {}, x0, 1e-13, 12, true);
  } catch (const newton_error& e) {
    threw = true;
    CHECK(e.last_residual >= 1.0);  // x^2 + 1 never drops below 1
  }
  CHECK(threw);
}

TEST_CASE("nelder_mead_min finds a quadratic minimum") {
  auto f = [](const Eigen::VectorXd& v) {
    return (v[0] - 1.5) * (v[0] - 1.5) + 3.0 * (v[1] + 0.25) * (v[1] + 0.25);
  };
  Eigen::VectorXd x0(2);
  x0 << 0.0, 0.0;
  Eigen::VectorXd m = nelder_mead_min(f, x0, 1e-12, 5000);
  CHECK(m[0] == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(m[1] == doctest::Approx(-0.25).epsilon(1e-5));
}

TEST_CASE("nelder_mead_min surfaces the best point when the budget runs out") {
  auto f = [](const Eigen::VectorXd& v) { return std::abs(v[0] - 2.0) + 1.0; };
  Eigen::VectorXd x0(1);
  x0 << 40.0;
  bool threw = false;
  try {
    nelder_mead_min(f, x0, 1e-16, 10);  // budget too small to satisfy tol
  } catch (const nm_budget_error& e) {
    threw = true;
    CHECK(e.best.size() == 1);
    CHECK(e.fbest >= 1.0);
    CHECK(e.fbest <= f(x0));  // never worse than the seed
  }
  CHECK(threw);
}

}  // TEST_SUITE
