#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "kdvlim/hopf.hpp"
#include "kdvlim/painleve.hpp"
#include "kdvlim/whitham.hpp"

namespace kdvlim {

// Local average of the oscillatory solution: beta1 + beta2 + beta3 + 2 alpha.
double weak_limit(const std::array<double, 3>& beta);

// Exact one-phase traveling wave with fixed branch points beta1 > beta2 >
// beta3 and phase shift q:
//   u = beta2 + beta3 - beta1 + 2 (beta1 - beta3) dn^2(2 K(s) Omega + K(s)),
//   Omega = sqrt(beta1 - beta3) / (2 eps K(s)) (x - 2 t sum(beta) - q).
double cnoidal_wave(double x, double t, double eps, const std::array<double, 3>& beta,
                    double q = 0.0);

struct OnePhaseParams {
  std::array<double, 3> beta;  // actual branch points
  double s = 0.0;              // elliptic modulus
  double imT = 0.0;            // K'(s)/K(s); the theta period is i*imT
  double alpha = 0.0;
  double qshift = 0.0;
  double Omega = 0.0;
};

OnePhaseParams one_phase_params(double x, double t, double eps, const WhithamBranches& br,
                                const InitialDataProfile& p);

// Modulated one-phase approximation with branch points interpolated from a
// solved Whitham zone.  The dn form is the default; theta_form evaluates the
// equivalent log-theta-second-derivative expression.
double one_phase_approx(double x, double t, double eps, const WhithamBranches& br,
                        const InitialDataProfile& p, bool theta_form = false);

struct LeadingEdgeFrame {
  EdgeState edge;
  double Theta = 0.0;   // fast phase
  double Theta1 = 0.0;  // order eps^{1/3} phase correction
  double c = 0.0;
  double sPII = 0.0;
};

LeadingEdgeFrame leading_edge_frame(double x, double t, double eps, const EdgeState& e,
                                    const PainleveSolution& hm, const InitialDataProfile& p);

// Oscillatory envelope expansion near the left zone boundary; the envelope is
// the Hastings-McLeod transcendent.  include_order23 toggles the phase
// correction, the Hopf Taylor term, and the sin^2 term together.
double leading_edge_approx(double x, double t, double eps, const EdgeState& e,
                           const PainleveSolution& hm, const InitialDataProfile& p,
                           bool include_order23 = true);

struct SolitonTrain {
  EdgeState edge;
  double y = 0.0;
  double M = 10.0;
  double gamma = 0.0;
  std::vector<double> Xj;
};

SolitonTrain soliton_train(double x, double t, double eps, const EdgeState& e, double M = 10.0);

// Soliton-train expansion near the right zone boundary:
//   u + 2 (v - u) sum_j sech^2(X_j).
double trailing_edge_approx(double x, double t, double eps, const EdgeState& e, double M = 10.0);

// Cache of fourth-order-equation solves keyed by T, warm-starting each new
// solve from the nearest cached neighbor.
class Pi2Cache {
 public:
  explicit Pi2Cache(double x_l = -60.0, double x_r = 60.0, int Nc = 512);
  const PainleveSolution& at(double T);

 private:
  double xl_, xr_;
  int nc_;
  std::vector<std::unique_ptr<PainleveSolution>> sols_;  // sorted by T; stable addresses
};

struct CatastropheFrame {
  CatastrophePoint cp;
  double X = 0.0, T = 0.0;
  double U = 0.0, UX = 0.0, UXX = 0.0, UXXX = 0.0, Q = 0.0;
};

CatastropheFrame catastrophe_frame(double x, double t, double eps, const CatastrophePoint& cp,
                                   const PainleveSolution& pi2);

enum class CatastropheOrder { two_sevenths, four_sevenths };

// Multiscale expansion near the gradient catastrophe:
//   u_c + (eps/k)^{2/7} U(X, T) [- (eps/k)^{4/7} curvature correction].
double catastrophe_approx(double x, double t, double eps, const CatastrophePoint& cp,
                          Pi2Cache& pi2, CatastropheOrder order, const InitialDataProfile& p);

// Limit shapes of the catastrophe frame for cubic local data, parametrized by
// the similarity variable s = sqrt(k) (x - x_c - 6 u_c (t-t_c)) / (t-t_c)^{3/2}.
double connection_algebraic(double x, double t, const CatastrophePoint& cp);
std::array<double, 3> connection_selfsimilar(double s);
double connection_elliptic(double x, double t, double eps, const CatastrophePoint& cp);
double connection_pii(double x, double t, double eps, const CatastrophePoint& cp,
                      const PainleveSolution& hm);
double connection_soliton(double x, double t, double eps, const CatastrophePoint& cp);

// Phase-shift functional of the cubic profile f(w) = -w^3 (collapses to -b^3).
double q_cubic(double b1, double b2, double b3);

void write_approx_csv(const std::string& path, const std::string& formula, double t, double eps,
                      const std::vector<double>& x, const std::vector<double>& u);

}  // namespace kdvlim
