#pragma once

// Modulation machinery for the dispersive shock zone: the theta and q
// integrals over the initial-data inverse, characteristic velocities, the
// hodograph inversion on a square-stretched Chebyshev grid, and the confluent
// edge systems.
//
// Branch-point convention: the deepest branch point beta3 is stored
// "virtually": it decreases monotonically through the hump minimum umin.
// Stored values below umin encode a physical branch point 2*umin - beta3
// whose characteristic foot lies on the increasing side of the hump; q_phase
// and theta_vu reflect internally and add the second-branch corrections.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvlim/chebcore.hpp"
#include "kdvlim/hopf.hpp"

namespace kdvlim {

struct quadrature_error : std::runtime_error {
  double discrepancy;
  quadrature_error(const std::string& msg, double d) : std::runtime_error(msg), discrepancy(d) {}
};

struct degenerate_branch_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct continuation_error : std::runtime_error {
  int node;
  double last_residual;
  continuation_error(const std::string& msg, int node_, double res_)
      : std::runtime_error(msg), node(node_), last_residual(res_) {}
};

// theta(v; u) = (1/(2*sqrt2)) int_{-1}^{1} f_L'((1+m)v/2 + (1-m)u/2) dm/sqrt(1-m)
// evaluated after m = 1 - 2 sin^2(psi) as int_0^{pi/2} f_L'(v + sin^2psi (u-v))
// cos(psi) dpsi, 64-node Gauss-Legendre. dv_order = 0..3 differentiates in v
// under the integral. u below umin selects the second-branch augmented kernel
// theta + A(v,u)/sqrt(v-u) at the reflected u. check=true re-evaluates with
// 128 nodes and throws quadrature_error on disagreement > 1e-10.
double theta_vu(double v, double u, const InitialDataProfile& p, int dv_order = 0,
                bool check = true);

// A(v, u) = int_{-1}^{u} f_L'(xi) (v - xi)^{-1/2} dxi (u is the physical
// branch point on the increasing flank, u > umin... u in (umin, 0)).
double second_branch_A(double v, double u, const InitialDataProfile& p);

// q(beta1, beta2, beta3): symmetric double integral of f_L over the triangle
// spanned by the branch points, Gauss-Chebyshev x Gauss-Legendre 64x64.
// beta3 below umin adds the second-branch shift at the reflected argument.
double q_phase(double b1, double b2, double b3, const InitialDataProfile& p, bool check = true);

// Partial derivatives of q_phase with respect to (beta1, beta2, a) where
// a is the physical deepest branch point (reflection of beta3 when below
// umin); these are the partials entering the hodograph closure.
std::array<double, 3> q_phase_partials(double b1, double b2, double b3,
                                       const InitialDataProfile& p);

// Second-branch shift Delta q(b1, b2, a) for physical a in (umin, 0); decays
// like (a - umin)^{3/2} as a -> umin, making q_phase C^1 across the switch.
double second_branch_shift(double b1, double b2, double a, const InitialDataProfile& p);

// alpha = -b1 + (b1-b3) E(s)/K(s), s^2 = (b2-b3)/(b1-b3).
double elliptic_alpha(double b1, double b2, double b3);

// v_i = 4 prod_{k != i}(b_i - b_k)/(b_i + alpha) + 2(b1+b2+b3), physical
// (actual) branch points, b1 > b2 > b3. Throws degenerate_branch_error when
// some |b_i + alpha| < 1e-13.
std::array<double, 3> whitham_velocities(double b1, double b2, double b3);

// Residuals x - v_i t - w_i, w_i = (v_i - 2 sum beta)/2 * dq/dbeta_i + q.
// beta[2] may be virtual (below umin). Fully collapsed input reduces to the
// characteristic relation x - 6 b t - f_L(b) in every slot.
std::array<double, 3> hodograph_residual(const std::array<double, 3>& beta, double x, double t,
                                         const InitialDataProfile& p);

struct EdgeState {
  enum class Kind { leading, trailing };
  Kind kind = Kind::leading;
  double t = 0.0;
  double x_edge = 0.0;
  double u = 0.0;  // branch point on the outer characteristic (physical value)
  double v = 0.0;  // confluent pair value
  double c = 0.0;      // leading: -sqrt(u-v) theta_vv > 0
  double gamma = 0.0;  // trailing: 4 (v-u)^{5/4} sqrt(-theta_v) > 0
  double theta_v = 0.0, theta_vv = 0.0, theta_vvv = 0.0;
  bool right_flank = false;  // trailing past the flank-switch time
  double solve_residual = 0.0;
};

// Leading edge (u > v, speed-matching pair where beta2 = beta3): Newton with
// continuation in t from a grid-searched seed; collapse-law predictor close
// to tc.
EdgeState solve_leading_edge(double t, const InitialDataProfile& p);

// Trailing edge (v > u, beta1 = beta2). Routes transparently between the
// single-flank confluent system and its right-flank extension (augmented
// theta) when the deep characteristic foot crosses the hump bottom.
EdgeState solve_trailing_edge(double t, const InitialDataProfile& p);

// Modulated branch points over the zone [x-, x+] at fixed t, on two
// square-stretched Chebyshev half-grids sharing the zone midpoint:
//   half 0: x = x- + (D/2) (1+l)^2/4, l in [-1,1]  (resolves the x- edge)
//   half 1: x = x+ - (D/2) (1-l)^2/4               (resolves the x+ edge)
// with D = x+ - x-. beta3 stored virtually (monotone decreasing).
struct WhithamBranches {
  double t = 0.0;
  double xminus = 0.0, xplus = 0.0;
  int Nc = 0;
  EdgeState lead, trail;
  bool has_graze = false;      // beta3 reaches umin inside the zone
  double x0 = 0.0;             // graze location (valid when has_graze)
  double b1_at_x0 = 0.0, b2_at_x0 = 0.0;
  std::array<std::array<ChebFunction, 3>, 2> beta;  // [half][branch] on l-grid
  std::array<std::vector<double>, 2> node_x;        // x of node j (l-grid order)
  std::array<std::vector<double>, 2> residual;      // max |hodograph residual|
  double mid() const { return 0.5 * (xminus + xplus); }
  // Barycentric evaluation in l after inverting the square map; beta3 virtual.
  std::array<double, 3> eval(double x) const;
};

// Per-node hodograph inversion: Nelder-Mead on the squared residual sum
// seeded by continuation from the adjacent node (edges seeded from the edge
// states), then a Newton polish.
WhithamBranches solve_whitham_zone(double t, int Nc, const InitialDataProfile& p);

// CSV: header `# whitham-branches t=<v> Nc=<v> xminus=<v> xplus=<v>`, then
// rows `x, beta1, beta2, beta3, residual` with x strictly increasing.
void write_branches_csv(const std::string& path, const WhithamBranches& b);

}  // namespace kdvlim
