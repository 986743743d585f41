#pragma once
#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace kdvlim {

// Chebyshev collocation grid of order Nc on [a, b]; nodes are the mapped
// points cos(j pi / Nc), strictly decreasing in j (node 0 is b, node Nc is a).
struct ChebGrid {
  int Nc = 0;
  double a = -1.0, b = 1.0;
  std::vector<double> lnodes;  // unmapped, exactly +-1 at the ends
  std::vector<double> nodes;   // mapped to [a, b]
  static ChebGrid make(int Nc, double a, double b);
};

// Nodal values plus the Chebyshev expansion coefficients on a grid.
// |coeffs[Nc]| (relative to the largest coefficient) is the resolution
// indicator used throughout.
struct ChebFunction {
  ChebGrid grid;
  std::vector<double> values;
  std::vector<double> coeffs;
  static ChebFunction from_values(const ChebGrid& g, std::vector<double> v);
  double tail_indicator() const;  // max of last two |coeffs| / max |coeffs|
};

std::vector<double> cheb_vals2coeffs(const std::vector<double>& v);
std::vector<double> cheb_coeffs2vals(const std::vector<double>& c);

// Differentiation matrix of the given order (1..4) on the mapped grid,
// built by the barycentric-weight recursion with negative-sum diagonals.
Eigen::MatrixXd diff_matrix(const ChebGrid& g, int order);

// Barycentric Lagrange interpolation; exact at the nodes.  Throws outside
// [a, b] (no extrapolation).
double barycentric_eval(const ChebFunction& f, double x);

struct newton_error : std::runtime_error {
  double last_residual;
  explicit newton_error(const std::string& msg, double r)
      : std::runtime_error(msg), last_residual(r) {}
};

// Thrown when the simplex budget runs out; carries the best point found so
// callers may accept or refine it.
struct nm_budget_error : std::runtime_error {
  Eigen::VectorXd best;
  double fbest;
  nm_budget_error(const std::string& msg, Eigen::VectorXd b, double f)
      : std::runtime_error(msg), best(std::move(b)), fbest(f) {}
};

// Dense Newton with partial-pivot LU.  If jacobian is empty, a central
// finite-difference Jacobian with step 1e-7 (1 + |x|) is used.  With
// damped = true the step is halved (up to 10 times) until the residual
// norm decreases.
Eigen::VectorXd newton_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    Eigen::VectorXd x0, double tol, int maxit = 50, bool damped = false);

// Nelder-Mead simplex minimizer; returns when the simplex diameter falls
// below tol, throws nm_budget_error when the evaluation budget runs out.
Eigen::VectorXd nelder_mead_min(const std::function<double(const Eigen::VectorXd&)>& f,
                                Eigen::VectorXd x0, double tol, int max_evals = 5000);

}  // namespace kdvlim
