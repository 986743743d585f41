// Command-line front end: KdV runs, Whitham zones, Painleve tabulation,
// asymptotic formula dumps, error fields, scaling sweeps, and the full
// pipeline.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kdvlim/harness.hpp"

using namespace kdvlim;

namespace {

int cmd_solve(double eps, double t, std::optional<int> nmodes, std::optional<long long> nsteps,
              double L, bool extended, const std::string& out) {
  GridField u0 = make_field(nmodes ? *nmodes : resolution_modes(eps, L, extended), L,
                            [](double x) {
                              double c = std::cosh(x);
                              return -1.0 / (c * c);
                            });
  KdvRunConfig cfg;
  cfg.epsilon = eps;
  cfg.tmax = t;
  cfg.Nt = nsteps ? *nsteps : resolution_steps(eps, t);
  cfg.N = u0.N;
  cfg.L = L;
  cfg.snapshot_times = {t};
  KdvResult res = solve_kdv(u0, cfg);
  write_snapshot_csv(out, res.snapshots.back(), eps, res.snapshot_times.back());
  std::printf("N=%d Nt=%lld deltaE=%.3e deltaMass=%.3e tail=%.3e -> %s\n", cfg.N,
              static_cast<long long>(cfg.Nt), res.diag.deltaE, res.diag.deltaMass,
              res.diag.final_tail, out.c_str());
  return 0;
}

int cmd_whitham(double t, int nc, const std::string& out) {
  const InitialDataProfile& p = reference_profile();
  WhithamBranches br = solve_whitham_zone(t, nc, p);
  write_branches_csv(out, br);
  std::printf("x-=%.*g x+=%.*g lead(u=%.*g v=%.*g) trail(u=%.*g v=%.*g)%s -> %s\n", 17,
              br.xminus, 17, br.xplus, 17, br.lead.u, 17, br.lead.v, 17, br.trail.u, 17,
              br.trail.v, br.trail.right_flank ? " [right-flank]" : "", out.c_str());
  return 0;
}

int cmd_painleve(std::optional<double> T, int nc, const std::string& out) {
  if (T) {
    PainleveSolution sol = solve_pi2(*T, -60.0, 60.0, nc > 0 ? nc : 512);
    write_pi2_csv(out, sol);
    std::printf("fourth-order T=%.17g residual=%.3e -> %s\n", *T, sol.residual_norm, out.c_str());
  } else {
    PainleveSolution sol = solve_hastings_mcleod(-10.0, 10.0, nc > 0 ? nc : 160);
    write_pii_csv(out, sol);
    std::printf("second-order residual=%.3e -> %s\n", sol.residual_norm, out.c_str());
  }
  return 0;
}

int cmd_approx(const std::string& formula, double t, double eps, const std::string& region,
               double L, const std::string& out) {
  FrameSet frames(t, reference_profile());
  auto ev = make_evaluator(formula, t, eps, frames);
  Region reg = region == "auto" ? default_region(formula, t, eps, frames, L)
                                : Region{RegionKind::whole, -L, L};
  if (region == "interior") reg = interior_region(frames.zone());
  if (region == "leading") reg = leading_region(frames.zone().lead, eps);
  if (region == "trailing") reg = trailing_region(frames.zone().trail, eps);
  if (region == "breakup") reg = breakup_region(frames.cp, t, eps);
  const int n = 2001;
  std::vector<double> xs(n), us(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = reg.x_a + (reg.x_b - reg.x_a) * i / (n - 1);
    us[i] = ev(xs[i]);
  }
  write_approx_csv(out, formula, t, eps, xs, us);
  std::printf("%s on [%.17g, %.17g] -> %s\n", formula.c_str(), reg.x_a, reg.x_b, out.c_str());
  return 0;
}

int cmd_compare(const std::string& formula, double t, double eps, const std::string& region,
                double L, bool extended, const std::string& out) {
  FrameSet frames(t, reference_profile());
  GridField u = kdv_snapshot(eps, t, L, extended);
  auto ev = make_evaluator(formula, t, eps, frames);
  Region reg = region == "auto" ? default_region(formula, t, eps, frames, L)
                                : Region{RegionKind::whole, -L, L};
  if (region == "interior") reg = interior_region(frames.zone());
  if (region == "leading") reg = leading_region(frames.zone().lead, eps);
  if (region == "trailing") reg = trailing_region(frames.zone().trail, eps);
  if (region == "breakup") reg = breakup_region(frames.cp, t, eps);
  ErrorField ef = error_field(u, ev, reg);
  write_error_csv(out, ef, t, eps, formula);
  std::printf("Linf=%.17g on %s [%.17g, %.17g] -> %s\n", ef.linf, region_name(reg.kind),
              reg.x_a, reg.x_b, out.c_str());
  return 0;
}

int cmd_scaling(const std::string& formula, double t, const std::string& region, double L,
                bool extended, const std::string& out) {
  PipelineConfig cfg;
  cfg.t = t;
  cfg.epsilons = epsilon_ladder(extended);
  cfg.formulas = {formula};
  cfg.region = region;
  cfg.L = L;
  cfg.extended = extended;
  cfg.out_dir = out;
  run_pipeline(cfg);
  std::printf("reports in %s/\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"small-dispersion KdV study: solver, modulation theory, and asymptotics"};
  app.require_subcommand(1);

  double eps = 0.1, t = 0.4, L = 5.0 * 3.14159265358979323846;
  int nc = 0;
  std::optional<int> nmodes;
  std::optional<long long> nsteps;
  bool extended = false;
  std::string out = "out.csv", region = "auto", formula = "hopf", config_path;
  std::optional<double> Tval;

  auto add_common = [&](CLI::App* c, bool with_eps) {
    if (with_eps) c->add_option("--epsilon,-e", eps, "dispersion parameter");
    c->add_option("--t", t, "evaluation time");
    c->add_option("--L", L, "half-length of the periodic domain");
    c->add_option("--out", out, "output path");
    c->add_flag("--extended", extended, "allow the deep-epsilon ladder and mode caps");
  };

  CLI::App* solve = app.add_subcommand("solve", "integrate KdV and dump a snapshot");
  add_common(solve, true);
  solve->add_option("--nmodes", nmodes, "override Fourier mode count");
  solve->add_option("--nsteps", nsteps, "override time step count");

  CLI::App* whi = app.add_subcommand("whitham", "solve the modulation zone at time t");
  whi->add_option("--t", t, "evaluation time");
  whi->add_option("--nc", nc, "Chebyshev degree per half-zone")->default_val(64);
  whi->add_option("--out", out, "output path");

  CLI::App* pain = app.add_subcommand("painleve", "tabulate a transcendent");
  pain->add_option("--t", Tval, "fourth-order equation parameter T (omit for Hastings-McLeod)");
  pain->add_option("--nc", nc, "collocation degree");
  pain->add_option("--out", out, "output path");

  CLI::App* ap = app.add_subcommand("approx", "dump an asymptotic formula");
  add_common(ap, true);
  ap->add_option("--formula", formula,
                 "hopf|onephase|leading|trailing|catastrophe2|catastrophe4|conn-*");
  ap->add_option("--region", region, "auto|whole|interior|leading|trailing|breakup");

  CLI::App* cmp = app.add_subcommand("compare", "error field of a formula against KdV");
  add_common(cmp, true);
  cmp->add_option("--formula", formula,
                  "hopf|onephase|leading|trailing|catastrophe2|catastrophe4|conn-*");
  cmp->add_option("--region", region, "auto|whole|interior|leading|trailing|breakup");

  CLI::App* sc = app.add_subcommand("scaling", "epsilon-ladder regression for a formula");
  add_common(sc, false);
  sc->add_option("--formula", formula,
                 "hopf|onephase|leading|trailing|catastrophe2|catastrophe4|conn-*");
  sc->add_option("--region", region, "auto|whole|interior|leading|trailing|breakup");

  CLI::App* pipe = app.add_subcommand("pipeline", "run a full study from a config file");
  pipe->add_option("config", config_path, "plain `key = value` config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(eps, t, nmodes, nsteps, L, extended, out);
    if (whi->parsed()) return cmd_whitham(t, nc, out == "out.csv" ? "branches.csv" : out);
    if (pain->parsed()) return cmd_painleve(Tval, nc, out == "out.csv" ? "painleve.csv" : out);
    if (ap->parsed()) return cmd_approx(formula, t, eps, region, L, out);
    if (cmp->parsed()) return cmd_compare(formula, t, eps, region, L, extended, out);
    if (sc->parsed()) return cmd_scaling(formula, t, region, L, extended,
                                         out == "out.csv" ? "out" : out);
    if (pipe->parsed()) {
      run_pipeline(parse_config(config_path));
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
