#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fkdv/config.hpp"
#include "fkdv/linearized.hpp"
#include "fkdv/track.hpp"

namespace fkdv {

// Initial data phi_{c*}(x - xi*) + vbar*(x - xi*).
Field initial_perturbation(const RunConfig& cfg);
Field initial_field(const RunConfig& cfg);

struct TheoremReport {
  double gamma = 0.0;
  double horizon = 0.0;
  // Exponential rate of |vbar|_{H^1_{w_inf}} fitted for t >= 2/gamma.
  double decay_rate = 0.0;
  double decay_fit_start = 0.0;
  std::size_t decay_fit_points = 0;
  double sup_h1_vbar = 0.0;
  double sup_h1_v = 0.0;
  double sup_speed_gap = 0.0;
  double sup_position_gap = 0.0;
  double sup_log_alpha_gap = 0.0;
  double sup_omega_gap = 0.0;
  double max_ode_mismatch = 0.0;
  double speed_ratio_final = 0.0;
  double speed_ratio_predicted = 0.0;
  double speed_settling = 0.0;  // |c(T) - c(T/2)|
  double max_residual = 0.0;
  double max_j_mismatch = 0.0;
  double max_pythagoras_defect = 0.0;
  IdentityReport identities;
  // Weight schedule checks on the measured alpha.
  double delta = 0.0;
  double midpoint_margin = 0.0;
  std::vector<double> q_ratio_times;
  std::vector<double> q_ratios;
  // Feasibility ratios logged without thresholds.
  double c3_window_ratio = 0.0;   // delta * gamma
  double c3_rate_ratio = 0.0;     // gamma / ((1/3) alpha_max^-3 w_min (c0 - w_min^2))
  double c3_smallness = 0.0;      // (eps^p + eps^{1-4p}) * E
  double k_final = 0.0;
  std::map<std::string, bool> flags;
  double decay_band = 0.2;
};

// Throws std::invalid_argument when gamma T < 3 (rate fit impossible).
TheoremReport theorem_suite(const ModulationTrack& track, const RunConfig& cfg);

struct RunSnapshot {
  double t = 0.0;
  Field field;  // recentred field u(. + xi(t))
};

struct RunResult {
  RunConfig config;
  ModulationTrack track;
  TheoremReport report;
  // Set instead of report when the theorem suite cannot run (short horizon).
  std::string report_error;
  std::vector<RunSnapshot> snapshots;
};

RunResult run_experiment(const RunConfig& cfg, bool store_fields = false);

// Stable leading columns followed by diagnostic extras.
const std::vector<std::string>& track_columns();
void write_track_csv(const ModulationTrack& track, const std::filesystem::path& path);
// Rebuilds a track (rows only) from a CSV written by write_track_csv.
ModulationTrack read_track_csv(const std::filesystem::path& path, const RunConfig& cfg);

std::string report_json(const TheoremReport& r, const RunConfig& cfg);
// Writes track.csv, report.json, config.yaml and snapshots/ under dir.
void persist(const RunResult& result, const std::filesystem::path& dir);

// Output root: explicit value, else $FKDV_OUTPUT_ROOT, else "runs".
std::filesystem::path output_root(const std::string& explicit_dir = {});

struct SweepPoint {
  double epsilon = 0.0;
  double p = 0.0;
  TheoremReport report;
  std::string error;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  // Log-log slopes against epsilon, one entry per p value.
  std::map<double, double> speed_gap_slope;
  std::map<double, double> position_gap_slope;
  std::map<double, double> h1_slope;
};

// Runs every (epsilon, p) combination with up to `workers` concurrent runs.
// When out_dir is non-empty each point persists into its own subdirectory.
SweepResult sweep(const RunConfig& base, const std::vector<double>& epsilons, const std::vector<double>& ps,
                  unsigned workers, const std::filesystem::path& out_dir = {});
std::string sweep_json(const SweepResult& s);

struct LinearSuiteOptions {
  double c = 1.0;
  double w = 0.25;
  double w_minus = 0.2;
  double w_plus = 0.3;
  // The box edge mode sits about 6w/L right of the essential edge, so the
  // spectrum and rate fit use a long box; the short-time smoothing slope
  // needs high wavenumbers and uses a shorter one at the same resolution.
  double half_length = 80.0;
  double smoothing_half_length = 30.0;
  std::size_t num_points = 512;
  double transition_width = 1.0;
  std::vector<double> decay_times;      // for the beta fit
  std::vector<double> smoothing_times;  // for the k = 1 slope
  bool asymmetric = true;
};

struct LinearSuiteReport {
  LinearSuiteOptions options;
  double kernel_residual = 0.0;  // |L dphi/dx|_inf
  double jordan_residual = 0.0;  // |L dphi/dc - dphi/dx|_inf
  double jordan_residual_flipped = 0.0;  // |L dphi/dc + dphi/dx|_inf
  double essential_edge = 0.0;   // -w (c - w^2)
  std::size_t near_zero = 0;
  double kernel_radius = 0.0;
  double rightmost_nonkernel = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> decay_norms;
  DecayFit decay;
  std::vector<double> smoothing_norms;
  double smoothing_slope = 0.0;
  // Asymmetric pair
  double asym_bound = 0.0;  // min over both sides of w(c - w^2)
  double asym_rate = 0.0;
  std::size_t asym_near_zero = 0;
  double asym_rightmost_nonkernel = 0.0;
  std::map<std::string, bool> flags;
};

LinearSuiteOptions default_linear_options();
LinearSuiteReport linear_suite(const LinearSuiteOptions& opt);
std::string linear_json(const LinearSuiteReport& r);

struct PredictionRow {
  double t = 0.0;
  double c_ap = 0.0;
  double xi_ap = 0.0;
};
// Closed-form speed and the pure-predictor position (c_ap substituted for
// the measured speed). t may be +infinity, in which case xi_ap is infinite.
std::vector<PredictionRow> predict_table(const ForcingSpec& forcing, double c0, double xi0,
                                         const std::vector<double>& times);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};
// Fast property checks across all modules.
std::vector<CheckResult> property_suite();

}  // namespace fkdv
