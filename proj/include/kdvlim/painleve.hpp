#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlim/chebcore.hpp"

namespace kdvlim {

// Truncated series describing a Painleve transcendent far from the origin.
//   second Painleve (Hastings-McLeod branch):
//     left : q(s) = sqrt(sigma/2) * sum a_n sigma^{-3n},  sigma = -s
//     right: q(s) = Ai(s)
//   fourth-order equation ("P_I^2"):
//     U(X) = sgn * rho^{1/3} * sum d_n rho^{-n/3},  rho = |X|,
//     sgn = +1 on the left, -1 on the right.
// The series are divergent; evaluation truncates at the smallest term.
struct AsymptoticTail {
  enum class Equation { pii, pi2 };
  Equation eq = Equation::pii;
  int side = -1;               // -1: x -> -inf, +1: x -> +inf
  double T = 0.0;              // family parameter of the fourth-order equation
  std::vector<double> coeffs;

  double eval(double x) const;
  double eval_deriv(double x) const;
  int truncation_index(double x) const;  // last term kept at this point
};

AsymptoticTail tail_series_pii(int side, int order = 12);
AsymptoticTail tail_series_pi2(double T, int side, int order = 30);

// Collocation solution of one of the two transcendents on a Chebyshev grid.
// For the second Painleve equation q/qp hold q and q'; for the fourth-order
// equation they hold U and U_X, with U_XX and U_XXX in the extra slots.
struct PainleveSolution {
  bool fourth_order = false;
  double T = 0.0;
  ChebGrid grid;
  ChebFunction q, qp, qpp, qppp;
  double residual_norm = 0.0;  // max interior collocation residual

  double value(double x) const;
  double deriv(double x) const;
};

// Boundary-value solve for the Hastings-McLeod branch, collocated as the
// first-order system (q' = r, r' = s q + 2 q^3) with value conditions at
// both ends taken from the tail series.
PainleveSolution solve_hastings_mcleod(double x_l = -10.0, double x_r = 10.0, int Nc = 160);

// (q, q', p) at s with p = -q^4 - s q^2 + q'^2.
std::array<double, 3> hm_auxiliary(const PainleveSolution& sol, double s);

// Pole-free solution of X = 6TU - [U^3 + U_X^2/2 + U U_XX + U_XXXX/10],
// collocated as a first-order system with value and slope conditions at both
// ends.  `warm` reuses a previous solve as the Newton starting point; without
// it the solver falls back to continuation in T from 0 when needed.
PainleveSolution solve_pi2(double T, double x_l = -60.0, double x_r = 60.0, int Nc = 512,
                           const PainleveSolution* warm = nullptr);

// Q(X) = U_X U_XXX / 10 - U_XX^2 / 20 + X U - 3 T U^2 + U^4 / 4 + U U_X^2 / 2,
// the antiderivative of U fixed by its own closed form.
double pi2_Q(const PainleveSolution& sol, double X);

void write_pii_csv(const std::string& path, const PainleveSolution& sol);
void write_pi2_csv(const std::string& path, const PainleveSolution& sol);

}  // namespace kdvlim
