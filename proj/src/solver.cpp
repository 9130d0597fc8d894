#include "fkdv/solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fkdv/norms.hpp"

namespace fkdv {

namespace {

constexpr int kContourPoints = 32;

std::vector<double> sponge_profile(const GridSpec& grid, const SpongeLayer& sponge) {
  std::vector<double> sigma(grid.num_points, 0.0);
  if (!sponge.active()) return sigma;
  const double start = (1.0 - sponge.width_fraction) * grid.half_length;
  const double width = grid.half_length - start;
  for (std::size_t i = 0; i < grid.num_points; ++i) {
    const double d = std::abs(grid.x(i)) - start;
    if (d > 0.0) {
      const double s = std::sin(0.5 * std::numbers::pi * d / width);
      sigma[i] = sponge.strength * s * s;
    }
  }
  return sigma;
}

}  // namespace

void SolverConfig::validate(const GridSpec& grid) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver: dt must be positive");
  if (record_every == 0) throw std::invalid_argument("solver: record_every must be at least 1");
  if (!(sponge.width_fraction > 0.0 && sponge.width_fraction < 0.5))
    throw std::invalid_argument("solver: sponge width fraction must lie in (0, 0.5)");
  if (sponge.strength < 0.0) throw std::invalid_argument("solver: sponge strength must be non-negative");
  if (!std::isfinite(frame_speed)) throw std::invalid_argument("solver: frame speed must be finite");
  if (scheme == Scheme::imex_cn) {
    const double k = max_wavenumber(grid, dealias);
    if (dt * k * k * k > std::numbers::pi) {
      std::ostringstream msg;
      msg << "solver: imex_cn needs dt * kmax^3 <= pi, got dt=" << dt << ", kmax=" << k
          << " (dt*kmax^3=" << dt * k * k * k << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

BlowUpError::BlowUpError(double t, double max_abs)
    : std::runtime_error("solver: blow-up at t=" + std::to_string(t) + " (max|u|=" + std::to_string(max_abs) + ")"),
      time_(t) {}

Field kdv_rhs(const Field& u, double t, const ForcingSpec& forcing, bool dealias) {
  const GridSpec& g = u.grid();
  Spectrum sq = to_spectrum(hadamard(u, u));
  if (dealias) apply_dealias(sq);
  differentiate_spectrum(g, sq, 1);
  Spectrum uh = to_spectrum(u);
  differentiate_spectrum(g, uh, 3);
  const double a = forcing.amplitude(t);
  Field out(g);
  const Field nl = from_spectrum(g, sq);
  const Field d3 = from_spectrum(g, uh);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = -d3[i] - nl[i] + a * u[i];
  return out;
}

Stepper::Stepper(const GridSpec& grid, const ForcingSpec& forcing, const SolverConfig& config)
    : grid_(grid), forcing_(forcing), config_(config), h_(config.dt), speed_(config.frame_speed) {
  config_.validate(grid_);
  forcing_.validate();
  sponge_ = sponge_profile(grid_, config_.sponge);
  keep_ = config_.dealias ? dealias_mask(grid_.num_points) : std::vector<bool>(grid_.num_modes(), true);
  rebuild();
}

void Stepper::set_step(double h) {
  if (h == 0.0 || !std::isfinite(h)) throw std::invalid_argument("stepper: step must be non-zero");
  h_ = h;
  rebuild();
}

void Stepper::set_frame_speed(double s) {
  if (s == speed_) return;
  speed_ = s;
  rebuild();
}

void Stepper::reset() { have_prev_ = false; }

void Stepper::rebuild() {
  const std::size_t m = grid_.num_modes();
  const std::size_t nyq = grid_.num_points / 2;
  lin_.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double k = grid_.wavenumber(j);
    // -d^3 + s d  ->  i k^3 + i s k
    lin_[j] = j == nyq ? Complex(0.0) : Complex(0.0, k * k * k + speed_ * k);
  }
  have_prev_ = false;
  if (config_.scheme != Scheme::etdrk4) return;
  e_.resize(m);
  e2_.resize(m);
  q_.resize(m);
  f1_.resize(m);
  f2_.resize(m);
  f3_.resize(m);
  const double h = h_;
  // Contour-integral evaluation of the phi-functions (unit circle around each
  // h L, trapezoid rule), which avoids cancellation near h L = 0.
  std::vector<Complex> roots(kContourPoints);
  for (int r = 0; r < kContourPoints; ++r)
    roots[r] = std::exp(Complex(0.0, std::numbers::pi * (r + 0.5) / (kContourPoints / 2)));
  for (std::size_t j = 0; j < m; ++j) {
    const Complex z = h * lin_[j];
    e_[j] = std::exp(z);
    e2_[j] = std::exp(0.5 * z);
    Complex q = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (const Complex& r : roots) {
      const Complex lr = z + r;
      const Complex el = std::exp(lr);
      const Complex lr3 = lr * lr * lr;
      q += (std::exp(0.5 * lr) - 1.0) / lr;
      a += (-4.0 - lr + el * (4.0 - 3.0 * lr + lr * lr)) / lr3;
      b += (2.0 + lr + el * (-2.0 + lr)) / lr3;
      c += (-4.0 - 3.0 * lr - lr * lr + el * (4.0 - lr)) / lr3;
    }
    const double inv = 1.0 / kContourPoints;
    q_[j] = h * q * inv;
    f1_[j] = h * a * inv;
    f2_[j] = h * b * inv;
    f3_[j] = h * c * inv;
  }
}

void Stepper::explicit_terms(const Spectrum& u_hat, double t, Spectrum& out, Field& u) const {
  auto& fft = fourier_workspace(grid_.num_points);
  if (u.size() != grid_.num_points) u = Field(grid_);
  fft.inverse(u_hat, u.values());
  const double maxu = u.max_abs();
  if (!(maxu <= config_.blowup_threshold)) throw BlowUpError(t, maxu);
  std::vector<double> work(grid_.num_points);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] = u[i] * u[i];
  out.resize(grid_.num_modes());
  fft.forward(work, out);
  const std::size_t nyq = grid_.num_points / 2;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double k = grid_.wavenumber(j);
    out[j] = (keep_[j] && j != nyq) ? Complex(0.0, -k) * out[j] : Complex(0.0);
  }
  const double a = forcing_.amplitude(t);
  if (a != 0.0)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += a * u_hat[j];
  if (config_.sponge.active()) {
    for (std::size_t i = 0; i < work.size(); ++i) work[i] = sponge_[i] * u[i];
    Spectrum damp(grid_.num_modes());
    fft.forward(work, damp);
    // Same band limit as the nonlinear term so the sponge cannot feed the top third.
    for (std::size_t j = 0; j < out.size(); ++j)
      if (keep_[j] && j != nyq) out[j] -= damp[j];
  }
}

void Stepper::step(Spectrum& u_hat, double t) { step(u_hat, t, {}, AuxRhs()); }

void Stepper::step(Spectrum& v, double t, std::span<double> aux, const AuxRhs& aux_rhs) {
  const std::size_t m = v.size();
  const double h = h_;
  const bool with_aux = !aux.empty();
  if (with_aux && !aux_rhs) throw std::invalid_argument("stepper: auxiliary state without right-hand side");
  Field u(grid_);
  if (config_.scheme == Scheme::imex_cn) {
    if (with_aux) throw std::invalid_argument("stepper: auxiliary ODE requires the etdrk4 scheme");
    Spectrum nv;
    explicit_terms(v, t, nv, u);
    if (!have_prev_) prev_explicit_ = nv;
    for (std::size_t j = 0; j < m; ++j) {
      const Complex rhs = (1.0 + 0.5 * h * lin_[j]) * v[j] + h * (1.5 * nv[j] - 0.5 * prev_explicit_[j]);
      v[j] = rhs / (1.0 - 0.5 * h * lin_[j]);
    }
    prev_explicit_ = std::move(nv);
    have_prev_ = true;
    return;
  }

  const std::size_t na = aux.size();
  std::vector<double> ka(na), kb(na), kc(na), kd(na), ytmp(na);
  Spectrum nv, na_, nb, nc, a(m), b(m), c(m);

  explicit_terms(v, t, nv, u);
  if (with_aux) aux_rhs(t, u, v, aux, ka);
  for (std::size_t j = 0; j < m; ++j) a[j] = e2_[j] * v[j] + q_[j] * nv[j];

  explicit_terms(a, t + 0.5 * h, na_, u);
  if (with_aux) {
    for (std::size_t i = 0; i < na; ++i) ytmp[i] = aux[i] + 0.5 * h * ka[i];
    aux_rhs(t + 0.5 * h, u, a, ytmp, kb);
  }
  for (std::size_t j = 0; j < m; ++j) b[j] = e2_[j] * v[j] + q_[j] * na_[j];

  explicit_terms(b, t + 0.5 * h, nb, u);
  if (with_aux) {
    for (std::size_t i = 0; i < na; ++i) ytmp[i] = aux[i] + 0.5 * h * kb[i];
    aux_rhs(t + 0.5 * h, u, b, ytmp, kc);
  }
  for (std::size_t j = 0; j < m; ++j) c[j] = e2_[j] * a[j] + q_[j] * (2.0 * nb[j] - nv[j]);

  explicit_terms(c, t + h, nc, u);
  if (with_aux) {
    for (std::size_t i = 0; i < na; ++i) ytmp[i] = aux[i] + h * kc[i];
    aux_rhs(t + h, u, c, ytmp, kd);
  }
  for (std::size_t j = 0; j < m; ++j)
    v[j] = e_[j] * v[j] + nv[j] * f1_[j] + 2.0 * (na_[j] + nb[j]) * f2_[j] + nc[j] * f3_[j];
  for (std::size_t i = 0; i < na; ++i) aux[i] += h / 6.0 * (ka[i] + 2.0 * kb[i] + 2.0 * kc[i] + kd[i]);
}

InvariantSample compute_invariants(const Field& u) {
  const GridSpec& g = u.grid();
  Spectrum s = to_spectrum(u);
  Spectrum s1 = s, s2 = s;
  differentiate_spectrum(g, s1, 1);
  differentiate_spectrum(g, s2, 2);
  const Field ux = from_spectrum(g, s1);
  const Field uxx = from_spectrum(g, s2);
  InvariantSample r;
  double n = 0, grad = 0, cub = 0, uux2 = 0, quart = 0, curv = 0, mass = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i], d = ux[i], dd = uxx[i];
    n += v * v;
    grad += d * d;
    cub += v * v * v;
    uux2 += v * d * d;
    quart += v * v * v * v;
    curv += dd * dd;
    mass += v;
  }
  const double h = g.spacing;
  r.mass_sq = n * h;
  r.gradient_sq = grad * h;
  r.hamiltonian = 0.5 * grad * h - cub * h / 3.0;
  r.u_ux2 = uux2 * h;
  r.quartic = quart * h;
  r.e2 = curv * h - 10.0 / 3.0 * r.u_ux2 + 5.0 / 9.0 * r.quartic;
  r.mass = mass * h;
  return r;
}

Trajectory simulate(const Field& u0, double T, const ForcingSpec& forcing, const SolverConfig& config,
                    Observer* observer) {
  const GridSpec& g = u0.grid();
  config.validate(g);
  forcing.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("simulate: horizon must be positive");
  if (!u0.all_finite()) throw std::invalid_argument("simulate: initial data is not finite");
  const auto steps = static_cast<std::size_t>(std::ceil(T / config.dt - 1e-9));
  SolverConfig cfg = config;
  cfg.dt = T / static_cast<double>(steps);
  Stepper stepper(g, forcing, cfg);

  Trajectory traj;
  traj.grid = g;
  traj.dt = cfg.dt;
  Spectrum v = to_spectrum(u0);
  double offset = 0.0;

  auto record = [&](std::size_t n) {
    const double t = static_cast<double>(n) * cfg.dt;
    Field u = from_spectrum(g, v);
    traj.times.push_back(t);
    traj.invariants.push_back(compute_invariants(u));
    traj.frame_offset.push_back(offset);
    if (cfg.store_snapshots) traj.snapshots.push_back(u);
    if (observer) {
      if (auto upd = observer->on_record(t, u, offset)) {
        translate_spectrum(g, v, -upd->shift);
        offset += upd->shift;
        stepper.set_frame_speed(upd->speed);
      }
    }
  };

  record(0);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * cfg.dt;
    stepper.step(v, t);
    offset += stepper.frame_speed() * cfg.dt;
    if ((n + 1) % cfg.record_every == 0 || n + 1 == steps) record(n + 1);
  }
  return traj;
}

IdentityReport identity_monitor(const Trajectory& traj, const ForcingSpec& forcing) {
  return identity_monitor(traj.times, traj.invariants, forcing);
}

IdentityReport identity_monitor(const std::vector<double>& times, const std::vector<InvariantSample>& inv,
                                const ForcingSpec& forcing) {
  const std::size_t n = times.size();
  if (n < 5 || inv.size() != n) throw std::invalid_argument("identity_monitor: need at least five records");
  const double dt = times[1] - times[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("identity_monitor: record times must be uniformly spaced");

  IdentityReport r;
  const double n0 = inv[0].mass_sq, m0 = inv[0].mass, h0 = inv[0].hamiltonian;
  double mom_scale = 0.0;
  for (const auto& s : inv) mom_scale = std::max(mom_scale, std::abs(s.mass));
  for (std::size_t i = 0; i < n; ++i) {
    const double growth = forcing.log_growth(times[i]);
    const double nref = n0 * std::exp(2.0 * growth);
    r.mass_sq_law = std::max(r.mass_sq_law, std::abs(inv[i].mass_sq - nref) / nref);
    const double mref = m0 * std::exp(growth);
    if (mom_scale > 0.0) r.momentum_law = std::max(r.momentum_law, std::abs(inv[i].mass - mref) / mom_scale);
    r.mass_sq_drift = std::max(r.mass_sq_drift, std::abs(inv[i].mass_sq - n0) / n0);
    if (h0 != 0.0) r.hamiltonian_drift = std::max(r.hamiltonian_drift, std::abs(inv[i].hamiltonian - h0) / std::abs(h0));
  }

  auto ddt = [&](auto get, std::size_t i) {
    return (get(inv[i - 2]) - 8.0 * get(inv[i - 1]) + 8.0 * get(inv[i + 1]) - get(inv[i + 2])) / (12.0 * dt);
  };
  double h_def = 0, h_scale = 0, e_def = 0, e_scale = 0, h_mag = 0, e_mag = 0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double a = forcing.amplitude(times[i]);
    const auto& s = inv[i];
    const double h_rhs = a * (3.0 * s.hamiltonian - 0.5 * s.gradient_sq);
    const double e_rhs = 2.0 * a * s.e2 + a * (-10.0 / 3.0 * s.u_ux2 + 10.0 / 9.0 * s.quartic);
    const double hd = ddt([](const InvariantSample& x) { return x.hamiltonian; }, i);
    const double ed = ddt([](const InvariantSample& x) { return x.e2; }, i);
    h_def = std::max(h_def, std::abs(hd - h_rhs));
    e_def = std::max(e_def, std::abs(ed - e_rhs));
    h_scale = std::max(h_scale, std::abs(h_rhs));
    e_scale = std::max(e_scale, std::abs(e_rhs));
    h_mag = std::max(h_mag, std::abs(s.hamiltonian));
    e_mag = std::max(e_mag, std::abs(s.e2));
  }
  // Unforced runs have a vanishing right-hand side; fall back to the size of
  // the functional itself.
  r.hamiltonian_identity = h_def / (h_scale > 0.0 ? h_scale : std::max(h_mag, 1e-300));
  r.e2_identity = e_def / (e_scale > 0.0 ? e_scale : std::max(e_mag, 1e-300));
  return r;
}

}  // namespace fkdv
