#include <doctest.h>
#include <initializer_list>

#include <cmath>

#include "kdvlim/specfun.hpp"

using namespace kdvlim;

TEST_SUITE("specfun") {

TEST_CASE("complete elliptic integrals against frozen references") {
  CHECK(elliptic_K(0.5) == doctest::Approx(1.6857503548125960429).epsilon(1e-13));
  CHECK(elliptic_E(0.7) == doctest::Approx(1.3556611355719554643).epsilon(1e-13));
  // near-degenerate modulus: the log singularity must still be accurate
  CHECK(elliptic_K(1.0 - 1e-6) == doctest::Approx(7.947479773562344765).epsilon(1e-12));
  CHECK(elliptic_K(0.0) == doctest::Approx(std::acos(-1.0) / 2.0).epsilon(1e-15));
  CHECK(elliptic_E(0.0) == doctest::Approx(std::acos(-1.0) / 2.0).epsilon(1e-15));
  CHECK(elliptic_E(1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Legendre relation E K' + E' K - K K' = pi/2") {
  const double pi = std::acos(-1.0);
  for (double s : {0.04, 0.3, 0.5714285714285715, 0.9, 0.99}) {
    double sp = 1.0 - s;
    double lhs = elliptic_E(s) * elliptic_K(sp) + elliptic_E(sp) * elliptic_K(s) -
                 elliptic_K(s) * elliptic_K(sp);
    CHECK(lhs == doctest::Approx(pi / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("Jacobi dn and sn values and identities") {
  CHECK(jacobi_dn(1.3, 0.8) == doctest::Approx(0.68937766046342669055).epsilon(1e-12));
  for (double s : {0.2, 0.5714285714285715, 0.95}) {
    for (double z : {-1.7, 0.3, 2.4}) {
      double sn = jacobi_sn(z, s);
      double dn = jacobi_dn(z, s);
      CHECK(dn * dn + s * sn * sn == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // quarter-period value dn(K) = sqrt(1 - s)
  double s = 0.5714285714285715;
  CHECK(jacobi_dn(elliptic_K(s), s) == doctest::Approx(std::sqrt(1.0 - s)).epsilon(1e-10));
}

TEST_CASE("dn degenerates to sech in the soliton limit") {
  CHECK(std::abs(jacobi_dn(2.0, 1.0 - 1e-10) - 1.0 / std::cosh(2.0)) < 1e-9);
  CHECK(jacobi_dn(2.0, 1.0 - 1e-10) == doctest::Approx(0.26580222903452343316).epsilon(1e-10));
}

TEST_CASE("theta3 values, periodicity, and log derivatives") {
  CHECK(theta3(0.0, 1.0) == doctest::Approx(1.0864348112133080146).epsilon(1e-13));
  // small imaginary period exercises the modular transformation
  CHECK(theta3(0.2, 0.03) == doctest::Approx(0.087552973609543083604).epsilon(1e-11));
  CHECK(theta3(0.37, 0.8) == doctest::Approx(0.88909441361850702684).epsilon(1e-13));
  CHECK(theta3_ddlog(0.13, 0.42) == doctest::Approx(-14.065835226514656029).epsilon(1e-10));
  // theta3 is even and periodic with period 1 in z
  for (double z : {0.11, 0.37, 0.73}) {
    CHECK(theta3(z, 0.6) == doctest::Approx(theta3(z + 1.0, 0.6)).epsilon(1e-12));
    CHECK(theta3(z, 0.6) == doctest::Approx(theta3(-z, 0.6)).epsilon(1e-12));
  }
  // dlog matches a central difference of log theta3
  double h = 1e-6;
  double fd = (std::log(theta3(0.13 + h, 0.42)) - std::log(theta3(0.13 - h, 0.42))) / (2.0 * h);
  CHECK(theta3_dlog(0.13, 0.42) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("Airy function on both flanks") {
  struct Pt { double s, v; };
  const Pt pts[] = {
      {-15.0, 0.27821749087082892953},  {-12.0, -0.066555175054373129474},
      {-8.5, -0.33029023763020887902},  {-2.0, 0.22740742820168557599},
      {0.0, 0.35502805388781723926},    {2.0, 0.034924130423274379135},
      {5.0, 0.00010834442813607441735}, {6.5, 2.7958823432049135855e-6},
      {8.0, 4.6922076160992316256e-8},  {10.0, 1.1047532552898685934e-10},
      {12.0, 1.393184688875360839e-13}};
  for (const auto& p : pts) {
    double err = std::abs(airy_Ai(p.s) - p.v);
    CHECK(err < 1e-9 * std::abs(p.v) + 1e-12);
  }
  // derivative consistent with a five-point stencil at a moderate point
  double h = 1e-3;
  double fd = (-airy_Ai(1.0 + 2 * h) + 8 * airy_Ai(1.0 + h) - 8 * airy_Ai(1.0 - h) +
               airy_Ai(1.0 - 2 * h)) / (12.0 * h);
  CHECK(airy_Aip(1.0) == doctest::Approx(fd).epsilon(1e-9));
}

TEST_CASE("normalized Hermite coefficients") {
  CHECK(hermite_norm(10) == doctest::Approx(0.012617723136776038159).epsilon(1e-12));
  CHECK(hermite_norm(0) == doctest::Approx(std::pow(std::acos(-1.0), -0.25)).epsilon(1e-13));
  // ratio recurrence h_{j+1}/h_j = sqrt(2/(j+1))
  for (int j : {3, 17, 80, 150}) {
    CHECK(hermite_norm(j + 1) / hermite_norm(j) ==
          doctest::Approx(std::sqrt(2.0 / (j + 1))).epsilon(1e-12));
  }
}

}  // TEST_SUITE
