#include <doctest.h>
#include <initializer_list>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>

#include "kdvlim/asymptotics.hpp"
#include "kdvlim/kdv_spectral.hpp"

using namespace kdvlim;

namespace {
double sech2(double x) {
  double c = std::cosh(x);
  return 1.0 / (c * c);
}
}  // namespace

TEST_SUITE("kdv_spectral") {

TEST_CASE("etdrk4 phi weights: small-z limits and moderate-z values") {
  auto w0 = etdrk4_phi(std::complex<double>(1e-9, 1e-9));
  const double lim[5] = {1.0, 0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(w0[i].real() - lim[i]) < 1e-8);
    CHECK(std::abs(w0[i].imag()) < 1e-7);
  }
  // direct formulas at z = 1 (outside the contour region)
  auto w1 = etdrk4_phi(std::complex<double>(1.0, 0.0));
  double e = std::exp(1.0);
  CHECK(w1[0].real() == doctest::Approx(e - 1.0).epsilon(1e-12));
  CHECK(w1[1].real() == doctest::Approx(std::exp(0.5) - 1.0).epsilon(1e-12));
  CHECK(w1[2].real() == doctest::Approx(-5.0 + 2.0 * e).epsilon(1e-11));
  CHECK(w1[3].real() == doctest::Approx(3.0 - e).epsilon(1e-11));
  CHECK(w1[4].real() == doctest::Approx(-8.0 + 3.0 * e).epsilon(1e-11));
}

TEST_CASE("etdrk4 phi weights: contour/direct continuity across |z| = 1/2") {
  for (double th : {0.3, 1.2, 1.5707963267948966, 2.8}) {
    std::complex<double> dir(std::cos(th), std::sin(th));
    auto a = etdrk4_phi(0.499 * dir);
    auto b = etdrk4_phi(0.501 * dir);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-6);
  }
}

TEST_CASE("mass and energy of the reference initial data") {
  const double L = 5.0 * std::acos(-1.0);
  auto g = make_field(4096, L, [](double x) { return -sech2(x); });
  CHECK(mass(g) == doctest::Approx(-2.0 * std::tanh(L)).epsilon(1e-13));
  double eps = 1e-2;
  double ex = -32.0 / 15.0 - eps * eps * 16.0 / 15.0;
  CHECK(energy(g, eps) == doctest::Approx(ex).epsilon(1e-9));
  CHECK(fourier_tail(g) < 1e-12);  // analytic data decays to machine noise
}

TEST_CASE("cnoidal traveling wave advances one cell per cell time") {
  const std::array<double, 3> beta = {-0.2, -0.5, -0.9};
  const double eps = 0.1;
  const double L = 2.294647286565792;       // five spatial cells per half-domain
  const double Tcell = 0.143415455410362;   // cell length over |speed| = 3.2
  KdvRunConfig cfg;
  cfg.epsilon = eps;
  cfg.tmax = Tcell;
  cfg.Nt = 4000;
  cfg.N = 1024;
  cfg.L = L;
  cfg.snapshot_times = {Tcell};
  auto res = solve_kdv(make_field(cfg.N, cfg.L, [&](double x) { return cnoidal_wave(x, 0.0, eps, beta); }), cfg);
  REQUIRE(res.snapshots.size() == 1);
  const GridField& u = res.snapshots[0];
  double err = 0.0;
  for (int j = 0; j < u.N; ++j)
    err = std::fmax(err, std::abs(u.u[j] - cnoidal_wave(grid_x(u, j), Tcell, eps, beta)));
  CHECK(err < 1e-6);
  CHECK(res.diag.deltaE < 1e-6);
  CHECK(res.diag.deltaMass < 1e-10);
}

TEST_CASE("fourth-order convergence in the step count") {
  const double L = 5.0 * std::acos(-1.0);
  auto run = [&](long long Nt) {
    KdvRunConfig cfg;
    cfg.epsilon = 0.1;
    cfg.tmax = 0.1;
    cfg.Nt = Nt;
    cfg.N = 512;
    cfg.L = L;
    cfg.snapshot_times = {0.1};
    auto res = solve_kdv(make_field(cfg.N, cfg.L, [](double x) { return -sech2(x); }), cfg);
    return res.snapshots[0];
  };
  GridField u1 = run(100), u2 = run(200), u4 = run(400);
  double d12 = 0.0, d24 = 0.0;
  for (int j = 0; j < u1.N; ++j) {
    d12 = std::fmax(d12, std::abs(u1.u[j] - u2.u[j]));
    d24 = std::fmax(d24, std::abs(u2.u[j] - u4.u[j]));
  }
  double ratio = d12 / d24;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("conservation gates hold on an admissible production run") {
  const double L = 5.0 * std::acos(-1.0);
  KdvRunConfig cfg;
  cfg.epsilon = 0.1;
  cfg.tmax = 0.4;
  cfg.Nt = 4000;
  cfg.N = 4096;
  cfg.L = L;
  cfg.snapshot_times = {0.4};
  auto res = solve_kdv(make_field(cfg.N, cfg.L, [](double x) { return -sech2(x); }), cfg);
  CHECK(res.diag.deltaE < 1e-6);
  CHECK(res.diag.deltaMass < 1e-10);
  CHECK(res.diag.final_tail < 1e-5);
  CHECK(res.diag.E0 == doctest::Approx(-32.0 / 15.0 - 0.01 * 16.0 / 15.0).epsilon(1e-8));
}

TEST_CASE("under-resolved run is rejected by the spectral tail gate") {
  const double L = 5.0 * std::acos(-1.0);
  KdvRunConfig cfg;
  cfg.epsilon = 0.1;
  cfg.tmax = 0.4;
  cfg.Nt = 2000;
  cfg.N = 64;
  cfg.L = L;
  CHECK_THROWS_AS(solve_kdv(make_field(cfg.N, cfg.L, [](double x) { return -sech2(x); }), cfg), resolution_error);
}

TEST_CASE("snapshot CSV carries the run header") {
  auto g = make_field(8, 1.0, [](double x) { return x; });
  auto path = (std::filesystem::temp_directory_path() / "kdvlim_snap_test.csv").string();
  write_snapshot_csv(path, g, 0.05, 0.125);
  std::FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  std::fclose(f);
  std::string s(line);
  CHECK(s.rfind("# kdv-snapshot epsilon=0.05", 0) == 0);
  CHECK(s.find(" t=0.125 ") != std::string::npos);
  CHECK(s.find(" N=8 ") != std::string::npos);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
