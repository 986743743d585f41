#include "kdvlim/kdv_spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "kdvlim/parallel.hpp"

namespace kdvlim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW planner calls are not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using cplx = std::complex<double>;

// Half-spectrum real transforms of fixed size N, with owned buffers.
// Forward: real[N] -> complex[N/2+1], unnormalized. Backward: the inverse
// scaled by N. Buffers are reused; callers copy data in and out.
class RealFft {
 public:
  explicit RealFft(int N) : N_(N), Nh_(N / 2 + 1) {
    real_ = fftw_alloc_real(N_);
    spec_ = fftw_alloc_complex(Nh_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(N_, real_, spec_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(N_, spec_, real_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("RealFft: planning failed");
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int N() const { return N_; }
  int Nh() const { return Nh_; }
  double* real() { return real_; }
  cplx* spec() { return reinterpret_cast<cplx*>(spec_); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int N_, Nh_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan fwd_, bwd_;
};

double direct_mass(const std::vector<double>& u, double L) {
  double s = 0.0;
  for (double x : u) s += x;
  return s * (2.0 * L / static_cast<double>(u.size()));
}

std::array<cplx, 5> phi_direct(cplx z) {
  cplx ez = std::exp(z);
  cplx ez2 = std::exp(0.5 * z);
  cplx z2 = z * z;
  cplx z3 = z2 * z;
  return {(ez - 1.0) / z,
          (ez2 - 1.0) / z,
          (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3,
          (2.0 + z + ez * (-2.0 + z)) / z3,
          (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3};
}

}  // namespace

std::array<cplx, 5> etdrk4_phi(cplx z) {
  if (std::abs(z) >= 0.5) return phi_direct(z);
  // Contour mean over a radius-1 circle centered at z; the circle stays away
  // from the removable singularity at 0 for |z| < 1/2.
  constexpr int M = 32;
  std::array<cplx, 5> acc{};
  for (int j = 0; j < M; ++j) {
    double th = kPi * (2.0 * j + 1.0) / M;
    cplx zj = z + cplx(std::cos(th), std::sin(th));
    auto v = phi_direct(zj);
    for (int c = 0; c < 5; ++c) acc[c] += v[c];
  }
  for (int c = 0; c < 5; ++c) acc[c] /= static_cast<double>(M);
  return acc;
}

GridField make_field(int N, double L, const std::function<double(double)>& f) {
  if (N < 2 || (N & (N - 1)) != 0) throw std::domain_error("make_field: N must be a power of 2");
  if (!(L > 0.0)) throw std::domain_error("make_field: L must be positive");
  GridField g;
  g.N = N;
  g.L = L;
  g.u.resize(N);
  for (int j = 0; j < N; ++j) g.u[j] = f(grid_x(g, j));
  sync_spectrum(g);
  return g;
}

double grid_x(const GridField& g, int j) { return -g.L + 2.0 * g.L * j / g.N; }

void sync_spectrum(GridField& g) {
  RealFft fft(g.N);
  std::copy(g.u.begin(), g.u.end(), fft.real());
  fft.forward();
  g.uhat.assign(g.N, cplx(0.0, 0.0));
  const cplx* h = fft.spec();
  for (int m = 0; m < fft.Nh(); ++m) {
    g.uhat[m] = h[m] / static_cast<double>(g.N);
    if (m > 0 && m < g.N / 2) g.uhat[g.N - m] = std::conj(g.uhat[m]);
  }
}

void sync_values(GridField& g) {
  RealFft fft(g.N);
  cplx* h = fft.spec();
  for (int m = 0; m < fft.Nh(); ++m) h[m] = g.uhat[m];
  fft.backward();
  g.u.assign(g.N, 0.0);
  for (int j = 0; j < g.N; ++j) g.u[j] = fft.real()[j];
}

double mass(const GridField& g) { return direct_mass(g.u, g.L); }

double energy(const GridField& g, double epsilon) {
  RealFft fft(g.N);
  std::copy(g.u.begin(), g.u.end(), fft.real());
  fft.forward();
  cplx* h = fft.spec();
  double kfac = kPi / g.L;
  for (int m = 0; m < fft.Nh(); ++m) {
    double k = kfac * m;
    if (2 * m == g.N) k = 0.0;  // Nyquist mode carries no odd derivative
    h[m] *= cplx(0.0, k) / static_cast<double>(g.N);
  }
  fft.backward();
  double s = 0.0;
  for (int j = 0; j < g.N; ++j) {
    double ux = fft.real()[j];
    double u = g.u[j];
    s += 2.0 * u * u * u - epsilon * epsilon * ux * ux;
  }
  return s * (2.0 * g.L / g.N);
}

double fourier_tail(const GridField& g) {
  if (g.uhat.empty()) throw std::domain_error("fourier_tail: spectrum not populated");
  int half = g.N / 2;
  int band = half - half / 10;  // |mm| >= 0.9 * N/2
  double mx = 0.0, tail = 0.0;
  for (int m = 0; m < g.N; ++m) {
    int mm = (m <= half) ? m : m - g.N;
    double a = std::abs(g.uhat[m]);
    mx = std::fmax(mx, a);
    if (std::abs(mm) >= band) tail = std::fmax(tail, a);
  }
  if (mx == 0.0) return 0.0;
  return tail / mx;
}

KdvResult solve_kdv(const GridField& u0, const KdvRunConfig& cfg) {
  if (u0.N != cfg.N || u0.L != cfg.L)
    throw std::domain_error("solve_kdv: initial field does not match config grid");
  if (!(cfg.epsilon > 0.0)) throw std::domain_error("solve_kdv: epsilon must be positive");
  if (cfg.Nt < 1 || !(cfg.tmax > 0.0)) throw std::domain_error("solve_kdv: invalid time grid");
  for (double ts : cfg.snapshot_times)
    if (ts < 0.0 || ts > cfg.tmax * (1.0 + 1e-12))
      throw std::domain_error("solve_kdv: snapshot time outside [0, tmax]");

  const int N = cfg.N;
  const int Nh = N / 2 + 1;
  const double h = cfg.tmax / static_cast<double>(cfg.Nt);
  const double kfac = kPi / cfg.L;
  const double eps2 = cfg.epsilon * cfg.epsilon;

  RealFft fft(N);

  // Per-mode linear phases and h-scaled stage coefficients.
  std::vector<cplx> E(Nh), E2(Nh), Q(Nh), F1(Nh), F2(Nh), F3(Nh);
  std::vector<double> kmul(Nh);  // -3k with Nyquist zeroed, for the nonlinearity
  for (int m = 0; m < Nh; ++m) {
    double k = kfac * m;
    cplx lam(0.0, eps2 * k * k * k);
    cplx z = h * lam;
    E[m] = std::exp(z);
    E2[m] = std::exp(0.5 * z);
    auto c = etdrk4_phi(z);
    Q[m] = h * c[1];
    F1[m] = h * c[2];
    F2[m] = h * c[3];
    F3[m] = h * c[4];
    kmul[m] = (2 * m == N) ? 0.0 : -3.0 * k;
  }
  int mcut = cfg.dealias ? N / 3 : Nh;  // zero modes with index > mcut

  std::vector<cplx> v(Nh), va(Nh), vb(Nh), vc(Nh), Nv(Nh), Na(Nh), Nb(Nh), Nc(Nh);
  for (int m = 0; m < Nh; ++m) v[m] = u0.uhat[m];

  // w <- N(w-input given in spec_) : -3ik * FFT(IFFT(.)^2), normalized spectrum.
  auto nonlinear = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    cplx* sp = fft.spec();
    for (int m = 0; m < Nh; ++m) sp[m] = in[m];
    fft.backward();
    double* re = fft.real();
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t j) { re[j] *= re[j]; });
    fft.forward();
    double inv = 1.0 / static_cast<double>(N);
    for (int m = 0; m < Nh; ++m) {
      cplx t = sp[m] * inv;
      out[m] = (m > mcut) ? cplx(0.0, 0.0) : cplx(0.0, kmul[m]) * t;
    }
  };

  auto finite = [&](const std::vector<cplx>& w) {
    for (const cplx& c : w)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  };

  GridField work;
  work.N = N;
  work.L = cfg.L;
  auto realize = [&](const std::vector<cplx>& w, GridField& out) {
    out.N = N;
    out.L = cfg.L;
    out.uhat.assign(N, cplx(0.0, 0.0));
    for (int m = 0; m < Nh; ++m) {
      out.uhat[m] = w[m];
      if (m > 0 && m < N / 2) out.uhat[N - m] = std::conj(w[m]);
    }
    cplx* sp = fft.spec();
    for (int m = 0; m < Nh; ++m) sp[m] = w[m];
    fft.backward();
    out.u.assign(N, 0.0);
    for (int j = 0; j < N; ++j) out.u[j] = fft.real()[j];
  };

  // Snapshot bookkeeping: map requested times to nearest step index.
  std::vector<long long> snap_step(cfg.snapshot_times.size());
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    long long s = std::llround(cfg.snapshot_times[i] / h);
    snap_step[i] = std::min<long long>(std::max<long long>(s, 0), cfg.Nt);
  }

  KdvResult res;
  res.snapshots.resize(cfg.snapshot_times.size());
  res.snapshot_times.resize(cfg.snapshot_times.size());

  long long sample_every = std::max<long long>(1, cfg.Nt / 200);

  auto record_state = [&](long long step) {
    double tnow = step * h;
    for (std::size_t i = 0; i < snap_step.size(); ++i)
      if (snap_step[i] == step) {
        realize(v, res.snapshots[i]);
        res.snapshot_times[i] = tnow;
      }
    if (step % sample_every == 0 || step == cfg.Nt) {
      if (!finite(v)) throw blowup_error("solve_kdv: state became non-finite at t=" + std::to_string(tnow));
      realize(v, work);
      res.diag.t.push_back(tnow);
      res.diag.E.push_back(energy(work, cfg.epsilon));
      if (step == 0) {
        res.diag.E0 = res.diag.E[0];
        res.diag.mass0 = mass(work);
      }
    }
  };

  record_state(0);
  for (long long step = 1; step <= cfg.Nt; ++step) {
    nonlinear(v, Nv);
    parallel_for(static_cast<std::size_t>(Nh), [&](std::size_t m) { va[m] = E2[m] * v[m] + Q[m] * Nv[m]; });
    nonlinear(va, Na);
    parallel_for(static_cast<std::size_t>(Nh), [&](std::size_t m) { vb[m] = E2[m] * v[m] + Q[m] * Na[m]; });
    nonlinear(vb, Nb);
    parallel_for(static_cast<std::size_t>(Nh), [&](std::size_t m) {
      vc[m] = E2[m] * va[m] + Q[m] * (2.0 * Nb[m] - Nv[m]);
    });
    nonlinear(vc, Nc);
    parallel_for(static_cast<std::size_t>(Nh), [&](std::size_t m) {
      v[m] = E[m] * v[m] + F1[m] * Nv[m] + 2.0 * F2[m] * (Na[m] + Nb[m]) + F3[m] * Nc[m];
    });
    record_state(step);
  }

  realize(v, work);
  res.diag.final_tail = fourier_tail(work);
  double dE = 0.0, scale = std::fabs(res.diag.E0);
  for (double Et : res.diag.E) {
    double d = std::fabs(Et - res.diag.E0);
    dE = std::fmax(dE, scale > 1e-300 ? d / scale : d);
  }
  res.diag.deltaE = dE;
  double m1 = mass(work);
  double msc = std::fmax(std::fabs(res.diag.mass0), 1e-300);
  res.diag.deltaMass = std::fabs(m1 - res.diag.mass0) / msc;
  if (res.diag.final_tail > 1e-5)
    throw resolution_error("solve_kdv: final spectrum tail " + std::to_string(res.diag.final_tail) +
                               " exceeds 1e-5; increase N",
                           res.diag.final_tail);
  return res;
}

namespace {
void write_header(std::FILE* f, const GridField& g, double epsilon, double t) {
  std::fprintf(f, "# kdv-snapshot epsilon=%.17g t=%.17g N=%d L=%.17g\n", epsilon, t, g.N, g.L);
}
}  // namespace

void write_snapshot_csv(const std::string& path, const GridField& g, double epsilon, double t) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_snapshot_csv: cannot open " + path);
  write_header(f, g, epsilon, t);
  for (int j = 0; j < g.N; ++j) std::fprintf(f, "%.17g,%.17g\n", grid_x(g, j), g.u[j]);
  std::fclose(f);
}

void write_spectral_csv(const std::string& path, const GridField& g, double epsilon, double t) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_spectral_csv: cannot open " + path);
  write_header(f, g, epsilon, t);
  int half = g.N / 2;
  for (int m = 0; m < g.N; ++m) {
    int mm = (m <= half) ? m : m - g.N;
    std::fprintf(f, "%d,%.17g,%.17g\n", mm, g.uhat[m].real(), g.uhat[m].imag());
  }
  std::fclose(f);
}

}  // namespace kdvlim
