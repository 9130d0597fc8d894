#pragma once

#include <functional>
#include <vector>

#include "fkdv/modulation.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/weights.hpp"

namespace fkdv {

struct TrackRow {
  double t = 0.0;
  // Decomposition of the recorded field (position in lab coordinates).
  double c = 0.0;
  double xi = 0.0;
  // Modulation ODE state carried with the PDE.
  double alpha = 1.0;
  double omega = 0.0;
  double c_ode = 0.0;
  double xi_ode = 0.0;
  double int_speed = 0.0;       // int_0^t c_ode
  double int_correction = 0.0;  // int_0^t f(gamma s) / sqrt(c_ode(s)) ds
  double c_ap = 0.0;
  double xi_ap = 0.0;
  InvariantSample invariants;
  double J = 0.0;
  double J_alt = 0.0;
  double pythagoras_defect = 0.0;
  double l2_vbar = 0.0;
  double h1_vbar = 0.0;
  double h1w_vbar_winf = 0.0;
  double h1w_v_schedule = 0.0;  // rescaled perturbation in H^1 with the scheduled weights
  double h1_v = 0.0;            // rescaled perturbation in plain H^1
  double w_minus = 0.0;
  double w_plus = 0.0;
  double residual = 0.0;
  int newton_iterations = 0;
  double K_diag = 0.0;
};

struct ModulationTrack {
  GridSpec grid;
  ForcingSpec forcing;
  double c0 = 0.0;
  double xi0 = 0.0;
  double w_inf = 0.0;
  WeightSchedule schedule;
  std::vector<TrackRow> rows;
  // Recentred fields u(. + xi) at each record when requested.
  std::vector<Field> centered;

  std::vector<double> column(double TrackRow::*member) const;
};

struct CoevolveOptions {
  double record_interval = 0.5;
  // Recentre the field at each record and move the frame with the soliton.
  bool comoving = true;
  WeightSchedule schedule;
  double w_inf = 0.1;
  double extraction_tol = 1e-12;
  bool store_fields = false;
  std::function<void(const TrackRow&, const Decomposition&)> on_record;
};

// Integrates the PDE together with the modulation ODE (same stages) and
// decomposes the field at every record. The record spacing divides T; dt is
// shrunk to fit a whole number of steps per record.
ModulationTrack coevolve(const Field& u0, double T, const ForcingSpec& forcing, const SolverConfig& config,
                         const CoevolveOptions& options);

// K(t) = eps + eps^{1+p}/gamma + sup_{s<=t}( e^{gamma s} |v|_{H^1_w(s)} + |v|_{H^1}
//        + gamma^{-1} e^{2 gamma s} |v|^2_{H^1_w(s)} ).
std::vector<double> k_diagnostic(const ModulationTrack& track, double p);

struct ApproximationGap {
  std::vector<double> log_alpha;  // |log alpha + (2/3) eps int f|
  std::vector<double> omega;      // |Omega - (2/3) eps int f / sqrt(c)|
  double sup_speed = 0.0;         // sup |c - c_ap|
  double sup_position = 0.0;      // sup |xi - xi_ap|
  double sup_log_alpha = 0.0;
  double sup_omega = 0.0;
  double max_ode_mismatch = 0.0;  // sup |c_ode - c|
};
ApproximationGap approximation_gap(const ModulationTrack& track);

}  // namespace fkdv
