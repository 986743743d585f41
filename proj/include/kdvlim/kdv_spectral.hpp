#pragma once

// Fourier pseudospectral solver for u_t + 6 u u_x + eps^2 u_xxx = 0 on the
// periodic domain [-L, L), with fourth-order exponential time differencing
// (ETD-RK4) stepping and conservation diagnostics.

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdvlim {

// Periodic field sampled at x_j = -L + 2L j/N together with its spectrum.
// uhat[m] holds the normalized coefficient of mode m in FFT order
// (m = 0..N-1, signed wavenumber k = pi*mm/L with mm = m or m-N), so that
// u_j = sum_m uhat[m] e^{i k x_j}. Real u implies Hermitian symmetry.
struct GridField {
  double L = 0.0;
  int N = 0;
  std::vector<double> u;
  std::vector<std::complex<double>> uhat;
};

// Build a field by sampling f on the periodic grid; fills both u and uhat.
GridField make_field(int N, double L, const std::function<double(double)>& f);

// Recompute uhat from u (forward transform) or u from uhat (inverse).
void sync_spectrum(GridField& g);
void sync_values(GridField& g);

// Grid abscissa x_j.
double grid_x(const GridField& g, int j);

struct KdvRunConfig {
  double epsilon = 0.1;
  double tmax = 0.4;
  long long Nt = 10000;
  int N = 4096;
  double L = 15.707963267948966;  // 5*pi
  std::vector<double> snapshot_times;
  bool dealias = false;
};

struct EnergyDiag {
  double E0 = 0.0;
  std::vector<double> t;
  std::vector<double> E;
  double deltaE = 0.0;
  double mass0 = 0.0;
  double deltaMass = 0.0;
  double final_tail = 0.0;
};

struct KdvResult {
  std::vector<GridField> snapshots;
  std::vector<double> snapshot_times;  // actual stored times (nearest step)
  EnergyDiag diag;
};

// Final-state spectrum underresolved: top-band coefficients above 1e-5.
struct resolution_error : std::runtime_error {
  double tail;
  resolution_error(const std::string& msg, double tail_) : std::runtime_error(msg), tail(tail_) {}
};

// NaN/Inf appeared during time stepping.
struct blowup_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cox-Matthews stage coefficients as functions of z = h*lambda, h-normalized:
// [0] phi1 = (e^z-1)/z
// [1] q    = (e^{z/2}-1)/z
// [2] f1   = (-4-z+e^z(4-3z+z^2))/z^3
// [3] f2   = (2+z+e^z(-2+z))/z^3
// [4] f3   = (-4-3z-z^2+e^z(4-z))/z^3
// Evaluated by a 32-point contour mean of radius 1 when |z| < 1/2 to avoid
// cancellation, by the direct formula otherwise.
std::array<std::complex<double>, 5> etdrk4_phi(std::complex<double> z);

// Advance u0 under KdV to cfg.tmax, storing snapshots at the time-grid points
// nearest the requested snapshot_times. Throws resolution_error if the final
// spectrum tail exceeds 1e-5 and blowup_error on non-finite state.
KdvResult solve_kdv(const GridField& u0, const KdvRunConfig& cfg);

// E[u] = int (2u^3 - eps^2 u_x^2) dx with spectral u_x and the exact periodic
// trapezoid rule.
double energy(const GridField& g, double epsilon);

// int u dx by the periodic trapezoid rule.
double mass(const GridField& g);

// Max modulus over the top 10% wavenumber band divided by the overall max
// modulus of the spectrum.
double fourier_tail(const GridField& g);

// CSV writers: header `# kdv-snapshot epsilon=<v> t=<v> N=<v> L=<v>`, then
// rows `x,u` (values) or `k,Re(uhat),Im(uhat)` (spectrum), 17 significant
// digits throughout.
void write_snapshot_csv(const std::string& path, const GridField& g, double epsilon, double t);
void write_spectral_csv(const std::string& path, const GridField& g, double epsilon, double t);

}  // namespace kdvlim
