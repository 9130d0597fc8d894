#include "fkdv/track.hpp"

#include <algorithm>
#include <cmath>

#include "fkdv/norms.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

std::vector<double> ModulationTrack::column(double TrackRow::*member) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*member);
  return out;
}

namespace {

// Norms of v = alpha^2 vbar(alpha x) from vbar directly.
void fill_perturbation_norms(TrackRow& row, const Decomposition& d, double alpha, const WeightPair& w,
                             double w_inf) {
  const WeightPair scaled{w.minus / alpha, w.plus / alpha};
  const WeightedH1Parts pw = weighted_h1_parts(d.vbar, scaled);
  const double a3 = alpha * alpha * alpha, a5 = a3 * alpha * alpha;
  row.h1w_v_schedule = std::sqrt(a3 * pw.value_sq + a5 * pw.derivative_sq);
  const WeightedH1Parts p0 = weighted_h1_parts(d.vbar, WeightPair{});
  row.h1_v = std::sqrt(a3 * p0.value_sq + a5 * p0.derivative_sq);
  row.l2_vbar = std::sqrt(p0.value_sq);
  row.h1_vbar = std::sqrt(p0.value_sq + p0.derivative_sq);
  row.h1w_vbar_winf = weighted_h1(d.vbar, w_inf);
}

}  // namespace

ModulationTrack coevolve(const Field& u0, double T, const ForcingSpec& forcing, const SolverConfig& config,
                         const CoevolveOptions& options) {
  const GridSpec& g = u0.grid();
  forcing.validate();
  config.validate(g);
  if (config.scheme != Scheme::etdrk4) throw std::invalid_argument("coevolve: requires the etdrk4 scheme");
  if (!(T > 0.0)) throw std::invalid_argument("coevolve: horizon must be positive");
  if (!(options.record_interval > 0.0)) throw std::invalid_argument("coevolve: record interval must be positive");

  const auto n_records = static_cast<std::size_t>(std::ceil(T / options.record_interval - 1e-9));
  const auto steps_per_record = static_cast<std::size_t>(std::ceil(T / n_records / config.dt - 1e-9));
  SolverConfig cfg = config;
  cfg.dt = T / static_cast<double>(n_records * steps_per_record);
  cfg.frame_speed = 0.0;

  ModulationTrack track;
  track.grid = g;
  track.forcing = forcing;
  track.schedule = options.schedule;
  track.w_inf = options.w_inf;

  Decomposition d0 = extract(u0, cold_guess(u0), options.extraction_tol);
  const double c0 = d0.c, xi0 = d0.xi;
  track.c0 = c0;
  track.xi0 = xi0;

  Stepper stepper(g, forcing, cfg);
  Spectrum v = to_spectrum(u0);
  // Lab position of the frame origin: ref + speed * (t - t_ref).
  double frame_ref = 0.0, frame_t = 0.0, speed = 0.0;
  auto frame_at = [&](double t) { return frame_ref + speed * (t - frame_t); };

  // y = (alpha, Omega, int c, int f/sqrt(c))
  std::vector<double> y = {1.0, 0.0, 0.0, 0.0};
  auto& fft = fourier_workspace(g.num_points);
  Spectrum work(g.num_modes());
  Field centred(g), centred_dx(g);

  AuxRhs rhs = [&](double t, const Field&, std::span<const Complex> uh, std::span<const double> state,
                   std::span<double> dy) {
    const double alpha = state[0];
    const double c = c0 / (alpha * alpha);
    const double local = xi0 + state[2] + state[1] - frame_at(t);
    std::copy(uh.begin(), uh.end(), work.begin());
    translate_spectrum(g, work, -local);
    fft.inverse(work, centred.values());
    differentiate_spectrum(g, work, 1);
    fft.inverse(work, centred_dx.values());
    const PhysicalFrameTerms terms = modulation_terms_physical(centred, centred_dx, alpha, c0);
    const ModulationRates r = rates_from_terms(terms, alpha, forcing.amplitude(t));
    dy[0] = r.alpha_t;
    dy[1] = r.omega_t;
    dy[2] = c;
    dy[3] = forcing.profile.value(forcing.gamma() * t) / std::sqrt(c);
  };

  double guess_c = c0, guess_xi = xi0;
  auto record = [&](double t) {
    const Field u = from_spectrum(g, v);
    const double alpha = y[0];
    const double c_ode = c0 / (alpha * alpha);
    const double xi_ode = xi0 + y[2] + y[1];
    Decomposition d = extract(u, {guess_c, guess_xi}, options.extraction_tol);
    TrackRow row;
    row.t = t;
    row.c = d.c;
    row.xi = d.xi + frame_at(t);
    row.alpha = alpha;
    row.omega = y[1];
    row.c_ode = c_ode;
    row.xi_ode = xi_ode;
    row.int_speed = y[2];
    row.int_correction = y[3];
    row.c_ap = predicted_speed(forcing, c0, t);
    row.xi_ap = xi0 + y[2] + 2.0 / 3.0 * forcing.epsilon * y[3];
    row.invariants = compute_invariants(u);
    const EnergyDiagnostics e = energy_diagnostics(d);
    row.J = e.J;
    row.J_alt = e.J_alt;
    row.pythagoras_defect = e.pythagoras_defect;
    const WeightPair w = options.schedule.at(t);
    row.w_minus = w.minus;
    row.w_plus = w.plus;
    fill_perturbation_norms(row, d, std::sqrt(c0 / d.c), w, options.w_inf);
    row.residual = std::max(std::abs(d.residual[0]), std::abs(d.residual[1]));
    row.newton_iterations = d.iterations;
    if (options.on_record) options.on_record(row, d);
    if (options.store_fields) track.centered.push_back(d.centered);
    track.rows.push_back(row);

    if (options.comoving) {
      translate_spectrum(g, v, -d.xi);
      frame_ref = frame_at(t) + d.xi;
      frame_t = t;
      speed = d.c;
      stepper.set_frame_speed(speed);
      guess_xi = 0.0;
    } else {
      guess_xi = d.xi;
    }
    guess_c = d.c;
  };

  record(0.0);
  std::size_t step = 0;
  for (std::size_t k = 0; k < n_records; ++k) {
    for (std::size_t s = 0; s < steps_per_record; ++s, ++step) {
      const double t = static_cast<double>(step) * cfg.dt;
      stepper.step(v, t, y, rhs);
    }
    // Advance the guess with the ODE so the Newton start stays close.
    const double t = static_cast<double>(step) * cfg.dt;
    guess_c = c0 / (y[0] * y[0]);
    guess_xi = xi0 + y[2] + y[1] - frame_at(t);
    record(t);
  }
  return track;
}

std::vector<double> k_diagnostic(const ModulationTrack& track, double p) {
  const double eps = track.forcing.epsilon;
  const double gamma = track.forcing.gamma();
  const double base = eps + std::pow(eps, p) * track.forcing.energy;
  std::vector<double> out;
  double running = 0.0;
  for (const auto& r : track.rows) {
    const double wv = r.h1w_v_schedule;
    double term = std::exp(gamma * r.t) * wv + r.h1_v;
    if (gamma > 0.0) term += std::exp(2.0 * gamma * r.t) * wv * wv / gamma;
    running = std::max(running, term);
    out.push_back(base + running);
  }
  return out;
}

ApproximationGap approximation_gap(const ModulationTrack& track) {
  ApproximationGap gap;
  const double eps = track.forcing.epsilon;
  for (const auto& r : track.rows) {
    const double la = std::abs(std::log(r.alpha) + 2.0 / 3.0 * track.forcing.log_growth(r.t));
    const double om = std::abs(r.omega - 2.0 / 3.0 * eps * r.int_correction);
    gap.log_alpha.push_back(la);
    gap.omega.push_back(om);
    gap.sup_log_alpha = std::max(gap.sup_log_alpha, la);
    gap.sup_omega = std::max(gap.sup_omega, om);
    gap.sup_speed = std::max(gap.sup_speed, std::abs(r.c - r.c_ap));
    gap.sup_position = std::max(gap.sup_position, std::abs(r.xi - r.xi_ap));
    gap.max_ode_mismatch = std::max(gap.max_ode_mismatch, std::abs(r.c_ode - r.c));
  }
  return gap;
}

}  // namespace fkdv
