#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kdvlim/asymptotics.hpp"
#include "kdvlim/kdv_spectral.hpp"

namespace kdvlim {

enum class RegionKind { interior, leading, trailing, breakup, whole };

struct Region {
  RegionKind kind = RegionKind::whole;
  double x_a = 0.0, x_b = 0.0;
};

const char* region_name(RegionKind k);

Region whole_region(double L);
// Interval symmetric about the zone center with half the zone length.
Region interior_region(const WhithamBranches& br);
// [x- - eps^{2/3}, x- + eps^{2/3}]
Region leading_region(const EdgeState& lead, double eps);
// [x+ + eps ln eps, x+ - eps ln eps]
Region trailing_region(const EdgeState& trail, double eps);
// [xc - eps^{6/7} Delta, xc + eps^{6/7} Delta] shifted by the frame drift
// 6 uc (t - tc).
Region breakup_region(const CatastrophePoint& cp, double t, double eps, double Delta = 5.0);

// Trigonometric interpolation of a spectral field at arbitrary x (exact for
// the stored band).
double trig_interp(const GridField& g, double x);

struct ErrorField {
  Region region;
  std::vector<double> x;
  std::vector<double> diff;  // |u_num - approx| on grid nodes inside region
  double linf = 0.0;
};

ErrorField error_field(const GridField& u_num, const std::function<double(double)>& approx,
                       const Region& region);

struct ScalingReport {
  std::string region;
  std::vector<double> epsilons;
  std::vector<double> deltas;
  double a = 0.0;        // slope of ln delta vs ln eps
  double b = 0.0;        // intercept
  double r = 0.0;        // correlation coefficient
  double sigma_a = 0.0;  // slope standard deviation
};

ScalingReport scaling_fit(const std::vector<double>& epsilons, const std::vector<double>& deltas);

struct MatchReport {
  double t = 0.0, eps = 0.0;
  std::string edge_kind;
  double x_lo = 0.0, x_hi = 0.0;      // interval where A beats B
  double err_lo = 0.0, err_hi = 0.0;  // envelope error at the matching points
  bool open_lo = false, open_hi = false;
};

// Envelope by windowed local maxima; window = 3 local oscillation wavelengths
// estimated from the spacing of near-zero dips of the error field.
std::vector<double> error_envelope(const std::vector<double>& x, const std::vector<double>& v);

// Crossings of the two envelopes nearest edge_x on each side; sides with no
// dominance transition are reported open with the window end as the bound.
MatchReport matching_zone(const ErrorField& errA, const ErrorField& errB, double edge_x);

// Resolution policy for the reference initial data on [-L, L).
int resolution_modes(double eps, double L, bool extended = false);
long long resolution_steps(double eps, double tmax);

// Solve KdV from u0 = -sech^2 x with the resolution policy and return the
// snapshot nearest t (cfg_out reports the settings used).
GridField kdv_snapshot(double eps, double t, double L = 15.707963267948966,
                       bool extended = false, KdvRunConfig* cfg_out = nullptr,
                       EnergyDiag* diag_out = nullptr);

// Shared per-time frames, built lazily: catastrophe data, Whitham zone,
// transcendent solves.
struct FrameSet {
  double t = 0.0;
  const InitialDataProfile* profile = nullptr;
  CatastrophePoint cp;
  int zone_nc = 64;

  explicit FrameSet(double t_, const InitialDataProfile& p);
  const WhithamBranches& zone();
  const PainleveSolution& hm();
  Pi2Cache& pi2();

 private:
  std::optional<WhithamBranches> zone_;
  std::optional<PainleveSolution> hm_;
  std::optional<Pi2Cache> pi2_;
};

// Named approximation evaluators at fixed (t, eps):
//   hopf, onephase, leading, trailing, catastrophe2, catastrophe4,
//   conn-algebraic, conn-elliptic, conn-pii, conn-soliton.
// Past the breaking time "onephase" switches from the characteristic solution
// to the modulated one-phase formula across the zone edges, so it describes
// the whole line.
std::function<double(double)> make_evaluator(const std::string& formula, double t, double eps,
                                             FrameSet& frames);

// Default region for a formula (what the scaling study of that formula uses).
Region default_region(const std::string& formula, double t, double eps, FrameSet& frames,
                      double L);

// Desk-scale epsilon ladder 10^{-1} .. 10^{-2.25}; extended appends the tail
// down to 10^{-3.5}.
std::vector<double> epsilon_ladder(bool extended = false);

void write_scaling_json(const std::string& path, const ScalingReport& rep);
void write_error_csv(const std::string& path, const ErrorField& ef, double t, double eps,
                     const std::string& formula);

struct PipelineConfig {
  double t = 0.4;
  std::vector<double> epsilons;
  std::vector<std::string> formulas;
  std::string region = "auto";  // or interior|leading|trailing|breakup|whole
  std::string out_dir = "out";
  double L = 15.707963267948966;
  int nc = 64;
  bool extended = false;
  std::optional<int> nmodes;        // override resolution policy
  std::optional<long long> nsteps;  // override step policy
};

PipelineConfig parse_config(const std::string& path);

struct pipeline_error : std::runtime_error {
  std::string stage;
  pipeline_error(const std::string& stage_, const std::string& msg)
      : std::runtime_error("stage " + stage_ + ": " + msg), stage(stage_) {}
};

// solve -> frames -> approximations -> error fields -> scaling fits, writing
// CSV artifacts per (formula, eps) and one scaling JSON per formula.
// Failures abort with the stage named; partial artifacts keep a `.partial`
// suffix. Deterministic for a fixed config.
void run_pipeline(const PipelineConfig& cfg);

}  // namespace kdvlim
