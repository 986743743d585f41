#include <doctest.h>
#include <initializer_list>

#include <cmath>

#include "kdvlim/chebcore.hpp"
#include "kdvlim/painleve.hpp"
#include "kdvlim/specfun.hpp"

using namespace kdvlim;

TEST_SUITE("painleve") {

TEST_CASE("left tail series of the Hastings-McLeod branch") {
  auto tail = tail_series_pii(-1, 12);
  const double a[7] = {1.0, -0.125, -0.5703125, -10.4072265625, -424.5690002441406,
                       -30692.611476898193, -3461468.551242113};
  REQUIRE(tail.coeffs.size() >= 7);
  for (int i = 0; i < 7; ++i) CHECK(tail.coeffs[i] == doctest::Approx(a[i]).epsilon(1e-12));
  CHECK(tail.eval(-8.0) == doctest::Approx(1.9995071978021464).epsilon(1e-12));
  CHECK(tail.eval(-10.0) == doctest::Approx(2.2357871694464113).epsilon(1e-12));
  CHECK(tail.eval(-12.0) == doctest::Approx(2.4493120787784437).epsilon(1e-12));
  // deeper in, more terms are worth keeping
  CHECK(tail.truncation_index(-12.0) >= tail.truncation_index(-8.0));
}

TEST_CASE("right tail of the Hastings-McLeod branch is Airy") {
  auto tail = tail_series_pii(+1, 12);
  CHECK(tail.eval(8.0) == doctest::Approx(airy_Ai(8.0)).epsilon(1e-12));
  CHECK(tail.eval_deriv(8.0) == doctest::Approx(airy_Aip(8.0)).epsilon(1e-12));
}

TEST_CASE("fourth-order equation tail coefficients") {
  auto r0 = tail_series_pi2(0.0, +1, 30);
  auto l0 = tail_series_pi2(0.0, -1, 30);
  CHECK(r0.coeffs[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r0.coeffs[7] == doctest::Approx(-1.0 / 18.0).epsilon(1e-10));
  CHECK(l0.coeffs[7] == doctest::Approx(+1.0 / 18.0).epsilon(1e-10));
  for (int i = 1; i < 7; ++i) CHECK(std::abs(r0.coeffs[i]) < 1e-12);

  auto r1 = tail_series_pi2(1.0, +1, 30);
  CHECK(r1.coeffs[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r1.coeffs[6] == doctest::Approx(-8.0 / 3.0).epsilon(1e-10));
  CHECK(r1.coeffs[7] == doctest::Approx(-1.0 / 18.0).epsilon(1e-10));
  CHECK(r1.coeffs[8] == doctest::Approx(16.0 / 3.0).epsilon(1e-10));
  auto l1 = tail_series_pi2(1.0, -1, 30);
  CHECK(l1.coeffs[7] == doctest::Approx(+1.0 / 18.0).epsilon(1e-10));

  auto rm = tail_series_pi2(-1.0, +1, 30);
  CHECK(rm.coeffs[2] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(rm.coeffs[6] == doctest::Approx(+8.0 / 3.0).epsilon(1e-10));

  CHECK(r0.eval(60.0) == doctest::Approx(-3.9148522077922876).epsilon(1e-9));
  CHECK(r0.eval_deriv(60.0) == doctest::Approx(-0.02174977916875188).epsilon(1e-9));
  CHECK(l0.eval(-60.0) == doctest::Approx(3.91488307199049).epsilon(1e-9));
  CHECK(r1.eval(60.0) == doctest::Approx(-4.423200084965954).epsilon(1e-9));
  CHECK(r1.eval_deriv(60.0) == doctest::Approx(-0.018977698414662812).epsilon(1e-9));
  CHECK(rm.eval(60.0) == doctest::Approx(-3.407245344205209).epsilon(1e-9));
  CHECK(rm.eval_deriv(60.0) == doctest::Approx(-0.02449339925516452).epsilon(1e-9));
}

TEST_CASE("Hastings-McLeod solve: origin values, Airy flank, left growth") {
  auto sol = solve_hastings_mcleod();
  CHECK(sol.residual_norm < 1e-10);
  auto o = hm_auxiliary(sol, 0.0);
  CHECK(o[0] == doctest::Approx(0.3670615515480784).epsilon(1e-9));
  CHECK(o[1] == doctest::Approx(-0.29537210544755016).epsilon(1e-9));
  CHECK(o[2] == doctest::Approx(0.06909138070892347).epsilon(1e-9));
  double ratio = sol.value(8.0) / airy_Ai(8.0);
  CHECK(ratio > 0.99);
  CHECK(ratio < 1.01);
  CHECK(std::abs(ratio - 1.0) < 1e-6);
  CHECK(sol.value(-8.0) == doctest::Approx(1.9995071978114656).epsilon(1e-8));
  auto m = hm_auxiliary(sol, -8.0);
  CHECK(m[2] == doctest::Approx(16.01566008117616).epsilon(1e-6));
}

TEST_CASE("auxiliary function satisfies p' = -q^2") {
  auto sol = solve_hastings_mcleod();
  for (double s : {-6.0, -2.0, 0.0, 1.5, 4.0}) {
    double h = 1e-3;
    auto pm2 = hm_auxiliary(sol, s - 2 * h)[2];
    auto pm1 = hm_auxiliary(sol, s - h)[2];
    auto pp1 = hm_auxiliary(sol, s + h)[2];
    auto pp2 = hm_auxiliary(sol, s + 2 * h)[2];
    double dp = (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) / (12.0 * h);
    double q = hm_auxiliary(sol, s)[0];
    CHECK(std::abs(dp + q * q) < 1e-8);
  }
}

TEST_CASE("fourth-order solve on the symmetric family member") {
  auto sol = solve_pi2(0.0);
  CHECK(sol.fourth_order);
  CHECK(sol.residual_norm < 1e-9);
  CHECK(sol.value(0.0) == doctest::Approx(-0.2747283752384125).epsilon(1e-6));
  CHECK(pi2_Q(sol, 0.0) == doctest::Approx(-0.15127995375003514).epsilon(1e-5));
  CHECK(sol.value(40.0) == doctest::Approx(-3.4199171637230297).epsilon(1e-6));
  CHECK(sol.value(-40.0) == doctest::Approx(3.419986608177484).epsilon(1e-6));
  CHECK(sol.value(7.0) == doctest::Approx(-1.9117826869604633).epsilon(1e-6));
  CHECK(sol.value(-7.0) == doctest::Approx(1.9058751862033576).epsilon(1e-6));
}

TEST_CASE("fourth-order solve at T = -1") {
  auto sol = solve_pi2(-1.0);
  CHECK(sol.residual_norm < 1e-9);
  CHECK(sol.value(0.0) == doctest::Approx(-0.0023089748262007043).epsilon(1e-5));
  CHECK(pi2_Q(sol, 0.0) == doctest::Approx(-9.238154086665822e-05).epsilon(1e-3));
  CHECK(sol.value(40.0) == doctest::Approx(-2.8417373675609046).epsilon(1e-6));
  CHECK(sol.value(-40.0) == doctest::Approx(2.8418172439253233).epsilon(1e-6));
  CHECK(sol.value(7.0) == doctest::Approx(-0.9997771944077949).epsilon(1e-6));
  CHECK(sol.value(-7.0) == doctest::Approx(1.0002349197395413).epsilon(1e-6));
}

TEST_CASE("fourth-order solve at T = +1: internal certificates") {
  auto sol = solve_pi2(1.0);
  CHECK(sol.residual_norm < 1e-9);
  // resolution pin: refining the grid does not move the solution
  auto fine = solve_pi2(1.0, -60.0, 60.0, 640, &sol);
  CHECK(std::abs(sol.value(0.0) - fine.value(0.0)) < 1e-8);
  // the interior solution lands on the far-field series
  auto tail = tail_series_pi2(1.0, +1, 30);
  CHECK(std::abs(sol.value(59.0) - tail.eval(59.0)) < 1e-4);
  // pole-free on the whole window
  double mx = 0.0;
  for (double v : sol.q.values) mx = std::fmax(mx, std::abs(v));
  CHECK(mx < 8.0);
}

TEST_CASE("family parameter acts as time: U_T + 6 U U_X + U_XXX = 0") {
  auto s0 = solve_pi2(0.0);
  double dT = 0.01;
  auto sp = solve_pi2(dT, -60.0, 60.0, 512, &s0);
  auto sm = solve_pi2(-dT, -60.0, 60.0, 512, &s0);
  for (double X : {-5.0, -2.0, 0.0, 1.5, 4.0}) {
    double UT = (sp.value(X) - sm.value(X)) / (2.0 * dT);
    double U = s0.value(X);
    double UX = s0.deriv(X);
    double UXXX = barycentric_eval(s0.qppp, X);
    CHECK(std::abs(UT + 6.0 * U * UX + UXXX) < 1e-4);
  }
}

}  // TEST_SUITE
