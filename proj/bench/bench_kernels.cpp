// Timing comparison of the OpenMP kernels against the serial reference path:
// ETD-RK4 stepping, the phase-shift quadrature batch, and a characteristic
// error-field sweep. Also verifies that both paths agree bitwise where the
// reduction order is fixed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "kdvlim/harness.hpp"
#include "kdvlim/parallel.hpp"

using namespace kdvlim;
using clk = std::chrono::steady_clock;

namespace {

double seconds(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clk::now();
    f();
    best = std::min(best, seconds(t0, clk::now()));
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", max_threads());
  const InitialDataProfile& p = reference_profile();

  // ETD-RK4: 200 steps at N=4096
  auto run_kdv = [&]() {
    GridField u0 = make_field(4096, 5.0 * 3.14159265358979323846, [](double x) {
      double c = std::cosh(x);
      return -1.0 / (c * c);
    });
    KdvRunConfig cfg;
    cfg.epsilon = 0.05;
    cfg.tmax = 0.02;
    cfg.Nt = 200;
    cfg.N = 4096;
    cfg.snapshot_times = {0.02};
    return solve_kdv(u0, cfg).snapshots.back().u[1000];
  };

  // phase-shift quadrature batch over a branch-point sweep
  auto run_q = [&]() {
    double acc = 0.0;
    for (int i = 0; i < 200; ++i) {
      double b2 = -0.55 + 0.3 * i / 199.0;
      acc += q_phase(-0.2, b2, -0.9, p, false);
    }
    return acc;
  };

  // characteristic solve swept over a fine x grid
  auto run_hopf = [&]() {
    double acc = 0.0;
    for (int i = 0; i < 20000; ++i) {
      double x = -3.0 + 4.0 * i / 19999.0;
      HopfSolution s = hopf_solve(x, 0.1, p);
      acc += s.u[0];
    }
    return acc;
  };

  struct Row {
    const char* name;
    double serial, parallel;
    double check_serial, check_parallel;
  };
  std::vector<Row> rows;

  auto bench = [&](const char* name, auto&& fn, int reps) {
    Row row{name, 0.0, 0.0, 0.0, 0.0};
    set_serial(true);
    row.check_serial = fn();
    row.serial = time_best_of(reps, [&] { fn(); });
    set_serial(false);
    row.check_parallel = fn();
    row.parallel = time_best_of(reps, [&] { fn(); });
    set_serial(true);
    rows.push_back(row);
  };

  bench("etdrk4-step", run_kdv, 3);
  bench("q-phase-batch", run_q, 3);
  bench("hopf-sweep", run_hopf, 3);

  std::printf("%-16s %12s %12s %8s  %s\n", "kernel", "serial[s]", "parallel[s]", "speedup",
              "agreement");
  for (const Row& r : rows) {
    double diff = std::abs(r.check_serial - r.check_parallel);
    std::printf("%-16s %12.4f %12.4f %7.2fx  |d|=%.3e\n", r.name, r.serial, r.parallel,
                r.serial / r.parallel, diff);
  }
  return 0;
}
