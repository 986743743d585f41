#include "kdvlim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace kdvlim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* region_name(RegionKind k) {
  switch (k) {
    case RegionKind::interior: return "interior";
    case RegionKind::leading: return "leading";
    case RegionKind::trailing: return "trailing";
    case RegionKind::breakup: return "breakup";
    case RegionKind::whole: return "whole";
  }
  return "?";
}

Region whole_region(double L) { return {RegionKind::whole, -L, L}; }

Region interior_region(const WhithamBranches& br) {
  double mid = br.mid();
  double quarter = 0.25 * (br.xplus - br.xminus);
  return {RegionKind::interior, mid - quarter, mid + quarter};
}

Region leading_region(const EdgeState& lead, double eps) {
  double w = std::pow(eps, 2.0 / 3.0);
  return {RegionKind::leading, lead.x_edge - w, lead.x_edge + w};
}

Region trailing_region(const EdgeState& trail, double eps) {
  double w = -eps * std::log(eps);  // eps ln eps < 0
  return {RegionKind::trailing, trail.x_edge - w, trail.x_edge + w};
}

Region breakup_region(const CatastrophePoint& cp, double t, double eps, double Delta) {
  double center = cp.xc + 6.0 * cp.uc * (t - cp.tc);
  double w = std::pow(eps, 6.0 / 7.0) * Delta;
  return {RegionKind::breakup, center - w, center + w};
}

double trig_interp(const GridField& g, double x) {
  int N = g.N;
  std::complex<double> acc = 0.0;
  for (int m = 0; m < N; ++m) {
    if (2 * m == N) {
      acc += g.uhat[m] * std::cos(kPi * (N / 2) / g.L * x);
      continue;
    }
    int mm = (2 * m < N) ? m : m - N;
    double k = kPi * mm / g.L;
    acc += g.uhat[m] * std::exp(std::complex<double>(0.0, k * x));
  }
  return acc.real();
}

ErrorField error_field(const GridField& u_num, const std::function<double(double)>& approx,
                       const Region& region) {
  if (!(region.x_a < region.x_b)) throw std::invalid_argument("error_field: empty region");
  ErrorField ef;
  ef.region = region;
  for (int j = 0; j < u_num.N; ++j) {
    double x = grid_x(u_num, j);
    if (x < region.x_a || x > region.x_b) continue;
    double d = std::abs(u_num.u[j] - approx(x));
    ef.x.push_back(x);
    ef.diff.push_back(d);
    ef.linf = std::max(ef.linf, d);
  }
  if (ef.x.empty()) throw std::invalid_argument("error_field: no grid nodes inside region");
  return ef;
}

ScalingReport scaling_fit(const std::vector<double>& epsilons, const std::vector<double>& deltas) {
  size_t n = epsilons.size();
  if (n != deltas.size() || n < 3) throw std::invalid_argument("scaling_fit: need >= 3 points");
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(epsilons[i] > 0.0) || !(deltas[i] > 0.0))
      throw std::invalid_argument("scaling_fit: data must be positive");
    lx[i] = std::log(epsilons[i]);
    ly[i] = std::log(deltas[i]);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("scaling_fit: degenerate abscissae");
  ScalingReport rep;
  rep.epsilons = epsilons;
  rep.deltas = deltas;
  rep.a = sxy / sxx;
  rep.b = my - rep.a * mx;
  rep.r = (syy == 0.0) ? 1.0 : sxy / std::sqrt(sxx * syy);
  double resid = syy - rep.a * rep.a * sxx;
  if (resid < 0.0) resid = 0.0;
  rep.sigma_a = (n > 2) ? std::sqrt(resid / ((n - 2) * sxx)) : 0.0;
  return rep;
}

std::vector<double> error_envelope(const std::vector<double>& x, const std::vector<double>& v) {
  size_t n = x.size();
  if (n != v.size() || n == 0) throw std::invalid_argument("error_envelope: bad input");
  double span = x.back() - x.front();
  // dips of |difference| mark sign changes of the underlying difference; the
  // local oscillation wavelength is twice their spacing
  std::vector<double> dipx;
  for (size_t i = 1; i + 1 < n; ++i) {
    if (v[i] <= v[i - 1] && v[i] <= v[i + 1] && v[i] < 0.5 * std::max(v[i - 1], v[i + 1]))
      dipx.push_back(x[i]);
  }
  // fewer than 3 dips means no resolved oscillation: the field is already its
  // own envelope
  if (dipx.size() < 3) return v;
  std::vector<double> sp(dipx.size() - 1);
  for (size_t i = 0; i + 1 < dipx.size(); ++i) sp[i] = dipx[i + 1] - dipx[i];
  std::nth_element(sp.begin(), sp.begin() + sp.size() / 2, sp.end());
  double med = sp[sp.size() / 2];
  double W = 6.0 * med;  // 3 wavelengths, wavelength = 2 x dip spacing
  W = std::min(W, span);
  std::vector<double> env(n);
  size_t lo = 0, hi = 0;
  for (size_t i = 0; i < n; ++i) {
    while (lo < n && x[lo] < x[i] - 0.5 * W) ++lo;
    while (hi < n && x[hi] <= x[i] + 0.5 * W) ++hi;
    double m = 0.0;
    for (size_t j = lo; j < hi; ++j) m = std::max(m, v[j]);
    env[i] = m;
  }
  return env;
}

MatchReport matching_zone(const ErrorField& errA, const ErrorField& errB, double edge_x) {
  size_t n = errA.x.size();
  if (n != errB.x.size()) throw std::invalid_argument("matching_zone: grids differ");
  for (size_t i = 0; i < n; ++i)
    if (std::abs(errA.x[i] - errB.x[i]) > 1e-12)
      throw std::invalid_argument("matching_zone: grids differ");
  std::vector<double> envA = error_envelope(errA.x, errA.diff);
  std::vector<double> envB = error_envelope(errB.x, errB.diff);
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = envA[i] - envB[i];

  MatchReport rep;
  rep.open_lo = rep.open_hi = true;
  rep.x_lo = errA.x.front();
  rep.x_hi = errA.x.back();
  rep.err_lo = envA.front();
  rep.err_hi = envA.back();
  double best_lo = -1.0, best_hi = -1.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0 || d[i] * d[i + 1] > 0.0) continue;
    double f = d[i] / (d[i] - d[i + 1]);
    double xc = errA.x[i] + f * (errA.x[i + 1] - errA.x[i]);
    double ec = envA[i] + f * (envA[i + 1] - envA[i]);
    if (xc <= edge_x) {
      double dist = edge_x - xc;
      if (best_lo < 0.0 || dist < best_lo) {
        best_lo = dist;
        rep.x_lo = xc;
        rep.err_lo = ec;
        rep.open_lo = false;
      }
    } else {
      double dist = xc - edge_x;
      if (best_hi < 0.0 || dist < best_hi) {
        best_hi = dist;
        rep.x_hi = xc;
        rep.err_hi = ec;
        rep.open_hi = false;
      }
    }
  }
  return rep;
}

int resolution_modes(double eps, double L, bool extended) {
  double target = 105.0 / eps * (L / (5.0 * kPi));
  int p = static_cast<int>(std::ceil(std::log2(std::max(target, 2.0))));
  p = std::clamp(p, 12, extended ? 19 : 15);
  return 1 << p;
}

long long resolution_steps(double eps, double tmax) {
  double want = std::ceil(60.0 * tmax / eps);
  return std::max(4000LL, static_cast<long long>(want));
}

GridField kdv_snapshot(double eps, double t, double L, bool extended, KdvRunConfig* cfg_out,
                       EnergyDiag* diag_out) {
  GridField u0 = make_field(resolution_modes(eps, L, extended), L, [](double x) {
    double c = std::cosh(x);
    return -1.0 / (c * c);
  });
  if (t == 0.0) {
    if (cfg_out) *cfg_out = KdvRunConfig{eps, 0.0, 0, u0.N, L, {}, false};
    return u0;
  }
  KdvRunConfig cfg;
  cfg.epsilon = eps;
  cfg.tmax = t;
  cfg.Nt = resolution_steps(eps, t);
  cfg.N = u0.N;
  cfg.L = L;
  cfg.snapshot_times = {t};
  if (cfg_out) *cfg_out = cfg;
  KdvResult res = solve_kdv(u0, cfg);
  if (diag_out) *diag_out = res.diag;
  return res.snapshots.back();
}

FrameSet::FrameSet(double t_, const InitialDataProfile& p) : t(t_), profile(&p) {
  cp = critical_point(p);
}

const WhithamBranches& FrameSet::zone() {
  if (!zone_) {
    if (t <= cp.tc) throw std::domain_error("FrameSet: no oscillation zone before breaking");
    zone_ = solve_whitham_zone(t, zone_nc, *profile);
  }
  return *zone_;
}

const PainleveSolution& FrameSet::hm() {
  if (!hm_) hm_ = solve_hastings_mcleod();
  return *hm_;
}

Pi2Cache& FrameSet::pi2() {
  if (!pi2_) pi2_.emplace();
  return *pi2_;
}

namespace {

// Characteristic solution with warm-started Newton; falls back to the full
// root isolation and picks the branch continuous with the respective outer
// flank when the fold is multivalued.
std::function<double(double)> hopf_evaluator(double t, const InitialDataProfile& p,
                                             const CatastrophePoint& cp) {
  auto last = std::make_shared<double>(std::nan(""));
  const InitialDataProfile* pp = &p;
  return [last, t, pp, cp](double x) {
    if (std::isfinite(*last)) {
      double xi = *last;
      for (int it = 0; it < 30; ++it) {
        double g = 6.0 * t * pp->u0(xi) + xi - x;
        double dg = 6.0 * t * pp->u0p(xi) + 1.0;
        if (std::abs(dg) < 1e-8) break;
        double step = g / dg;
        xi -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(xi))) {
          double res = 6.0 * t * pp->u0(xi) + xi - x;
          if (std::abs(res) < 1e-11 * (1.0 + std::abs(x)) && std::abs(xi - *last) < 0.5) {
            *last = xi;
            return pp->u0(xi);
          }
          break;
        }
      }
    }
    HopfSolution sol = hopf_solve(x, t, *pp);
    size_t pick = 0;
    if (sol.u.size() > 1) {
      // outer characteristic branch: the beta1 (largest-u) continuation left of
      // the zone, the beta3 (smallest-u) continuation right of it
      double drift = cp.xc + 6.0 * cp.uc * (t - cp.tc);
      pick = (x >= drift) ? 0 : sol.u.size() - 1;  // roots sorted by increasing u
    }
    *last = sol.xi[pick];
    return sol.u[pick];
  };
}

}  // namespace

std::function<double(double)> make_evaluator(const std::string& formula, double t, double eps,
                                             FrameSet& frames) {
  const InitialDataProfile& p = *frames.profile;
  if (formula == "hopf") return hopf_evaluator(t, p, frames.cp);
  if (formula == "onephase") {
    // modulated one-phase inside the zone, characteristic solution outside
    const WhithamBranches* br = &frames.zone();
    auto hopf = hopf_evaluator(t, p, frames.cp);
    const InitialDataProfile* pp = &p;
    return [br, hopf, t, eps, pp](double x) mutable {
      if (x <= br->xminus || x >= br->xplus) return hopf(x);
      return one_phase_approx(x, t, eps, *br, *pp);
    };
  }
  if (formula == "leading") {
    EdgeState e = frames.zone().lead;
    const PainleveSolution* hm = &frames.hm();
    const InitialDataProfile* pp = &p;
    return [e, hm, t, eps, pp](double x) { return leading_edge_approx(x, t, eps, e, *hm, *pp); };
  }
  if (formula == "trailing") {
    EdgeState e = frames.zone().trail;
    return [e, t, eps](double x) { return trailing_edge_approx(x, t, eps, e); };
  }
  if (formula == "catastrophe2" || formula == "catastrophe4") {
    CatastropheOrder ord = (formula == "catastrophe4") ? CatastropheOrder::four_sevenths
                                                       : CatastropheOrder::two_sevenths;
    Pi2Cache* cache = &frames.pi2();
    CatastrophePoint cp = frames.cp;
    const InitialDataProfile* pp = &p;
    return [cache, cp, ord, t, eps, pp](double x) {
      return catastrophe_approx(x, t, eps, cp, *cache, ord, *pp);
    };
  }
  if (formula == "conn-algebraic") {
    CatastrophePoint cp = frames.cp;
    return [cp, t](double x) { return connection_algebraic(x, t, cp); };
  }
  if (formula == "conn-elliptic") {
    CatastrophePoint cp = frames.cp;
    return [cp, t, eps](double x) { return connection_elliptic(x, t, eps, cp); };
  }
  if (formula == "conn-pii") {
    CatastrophePoint cp = frames.cp;
    const PainleveSolution* hm = &frames.hm();
    return [cp, hm, t, eps](double x) { return connection_pii(x, t, eps, cp, *hm); };
  }
  if (formula == "conn-soliton") {
    CatastrophePoint cp = frames.cp;
    return [cp, t, eps](double x) { return connection_soliton(x, t, eps, cp); };
  }
  throw std::invalid_argument("make_evaluator: unknown formula " + formula);
}

Region default_region(const std::string& formula, double t, double eps, FrameSet& frames,
                      double L) {
  if (formula == "hopf") {
    if (t >= frames.cp.tc) return breakup_region(frames.cp, t, eps);
    return whole_region(L);
  }
  if (formula == "onephase") return interior_region(frames.zone());
  if (formula == "leading") return leading_region(frames.zone().lead, eps);
  if (formula == "trailing") return trailing_region(frames.zone().trail, eps);
  return breakup_region(frames.cp, t, eps);
}

std::vector<double> epsilon_ladder(bool extended) {
  std::vector<double> out;
  int last = extended ? 10 : 5;
  for (int m = 0; m <= last; ++m) out.push_back(std::pow(10.0, -1.0 - 0.25 * m));
  return out;
}

void write_scaling_json(const std::string& path, const ScalingReport& rep) {
  nlohmann::json j;
  j["region"] = rep.region;
  j["epsilons"] = rep.epsilons;
  j["deltas"] = rep.deltas;
  j["a"] = rep.a;
  j["b"] = rep.b;
  j["r"] = rep.r;
  j["sigma_a"] = rep.sigma_a;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_scaling_json: cannot open " + path);
  f << j.dump(2) << "\n";
}

void write_error_csv(const std::string& path, const ErrorField& ef, double t, double eps,
                     const std::string& formula) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_error_csv: cannot open " + path);
  std::fprintf(f, "# error-field formula=%s region=%s t=%.17g epsilon=%.17g\n", formula.c_str(),
               region_name(ef.region.kind), t, eps);
  std::fprintf(f, "x,diff\n");
  for (size_t i = 0; i < ef.x.size(); ++i)
    std::fprintf(f, "%.17g,%.17g\n", ef.x[i], ef.diff[i]);
  std::fclose(f);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

PipelineConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("parse_config: cannot open " + path);
  PipelineConfig cfg;
  cfg.epsilons = epsilon_ladder(false);
  cfg.formulas = {"hopf"};
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parse_config: line " + std::to_string(lineno) +
                               " is not `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "t")
      cfg.t = std::stod(val);
    else if (key == "epsilon" || key == "epsilons") {
      cfg.epsilons.clear();
      for (const auto& e : split_list(val)) cfg.epsilons.push_back(std::stod(e));
    } else if (key == "formula" || key == "formulas")
      cfg.formulas = split_list(val);
    else if (key == "region")
      cfg.region = val;
    else if (key == "out")
      cfg.out_dir = val;
    else if (key == "L")
      cfg.L = std::stod(val);
    else if (key == "nc")
      cfg.nc = std::stoi(val);
    else if (key == "extended")
      cfg.extended = (val == "1" || val == "true" || val == "yes");
    else if (key == "nmodes")
      cfg.nmodes = std::stoi(val);
    else if (key == "nsteps")
      cfg.nsteps = std::stoll(val);
    else
      throw std::runtime_error("parse_config: unknown key `" + key + "`");
  }
  if (cfg.extended) {
    std::vector<double> full = epsilon_ladder(true);
    if (cfg.epsilons == epsilon_ladder(false)) cfg.epsilons = full;
  }
  return cfg;
}

namespace {

// Artifacts are written under a .partial suffix and renamed on completion, so
// an aborted stage leaves its unfinished products marked.
template <typename Fn>
void write_artifact(const std::string& path, Fn&& writer) {
  std::string tmp = path + ".partial";
  writer(tmp);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("artifact rename failed for " + path);
}

Region named_region(const std::string& name, const std::string& formula, double t, double eps,
                    FrameSet& frames, double L) {
  if (name == "auto") return default_region(formula, t, eps, frames, L);
  if (name == "whole") return whole_region(L);
  if (name == "interior") return interior_region(frames.zone());
  if (name == "leading") return leading_region(frames.zone().lead, eps);
  if (name == "trailing") return trailing_region(frames.zone().trail, eps);
  if (name == "breakup") return breakup_region(frames.cp, t, eps);
  throw std::runtime_error("unknown region `" + name + "`");
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  auto out = [&](const std::string& name) { return cfg.out_dir + "/" + name; };

  std::vector<GridField> fields(cfg.epsilons.size());
  try {
    for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
      double eps = cfg.epsilons[i];
      if (cfg.nmodes || cfg.nsteps) {
        GridField u0 = make_field(cfg.nmodes ? *cfg.nmodes : resolution_modes(eps, cfg.L, cfg.extended),
                                  cfg.L, [](double x) {
                                    double c = std::cosh(x);
                                    return -1.0 / (c * c);
                                  });
        KdvRunConfig rc;
        rc.epsilon = eps;
        rc.tmax = cfg.t;
        rc.Nt = cfg.nsteps ? *cfg.nsteps : resolution_steps(eps, cfg.t);
        rc.N = u0.N;
        rc.L = cfg.L;
        rc.snapshot_times = {cfg.t};
        fields[i] = solve_kdv(u0, rc).snapshots.back();
      } else {
        fields[i] = kdv_snapshot(eps, cfg.t, cfg.L, cfg.extended);
      }
      write_artifact(out("solution_eps" + std::to_string(i) + ".csv"), [&](const std::string& p) {
        write_snapshot_csv(p, fields[i], eps, cfg.t);
      });
    }
  } catch (const std::exception& e) {
    throw pipeline_error("solve", e.what());
  }

  const InitialDataProfile& prof = reference_profile();
  FrameSet frames(cfg.t, prof);
  try {
    bool need_zone = false;
    for (const auto& f : cfg.formulas)
      if (f == "onephase" || f == "leading" || f == "trailing" || cfg.region == "interior" ||
          cfg.region == "leading" || cfg.region == "trailing")
        need_zone = true;
    if (need_zone) {
      frames.zone_nc = cfg.nc;
      frames.zone();
      write_artifact(out("branches.csv"),
                     [&](const std::string& p) { write_branches_csv(p, frames.zone()); });
    }
  } catch (const std::exception& e) {
    throw pipeline_error("frames", e.what());
  }

  for (const auto& formula : cfg.formulas) {
    std::vector<double> deltas;
    Region last_region = whole_region(cfg.L);
    try {
      for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
        double eps = cfg.epsilons[i];
        auto ev = make_evaluator(formula, cfg.t, eps, frames);
        Region reg = named_region(cfg.region, formula, cfg.t, eps, frames, cfg.L);
        last_region = reg;
        ErrorField ef = error_field(fields[i], ev, reg);
        deltas.push_back(ef.linf);
        write_artifact(out("err_" + formula + "_eps" + std::to_string(i) + ".csv"),
                       [&](const std::string& p) { write_error_csv(p, ef, cfg.t, eps, formula); });
      }
    } catch (const std::exception& e) {
      throw pipeline_error("error-field " + formula, e.what());
    }
    try {
      ScalingReport rep;
      rep.region = region_name(last_region.kind);
      rep.epsilons = cfg.epsilons;
      rep.deltas = deltas;
      if (cfg.epsilons.size() >= 3) {
        rep = scaling_fit(cfg.epsilons, deltas);
        rep.region = region_name(last_region.kind);
      }
      write_artifact(out("scaling_" + formula + ".json"),
                     [&](const std::string& p) { write_scaling_json(p, rep); });
    } catch (const std::exception& e) {
      throw pipeline_error("scaling " + formula, e.what());
    }
  }
}

}  // namespace kdvlim
