#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fkdv/forcing.hpp"
#include "fkdv/grid.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

enum class Scheme { etdrk4, imex_cn };

// Damping -strength * ramp(x) u on the outer width_fraction of the box,
// absorbing radiation before it wraps around. Off when strength == 0.
struct SpongeLayer {
  double width_fraction = 0.1;
  double strength = 0.0;
  bool active() const { return strength > 0.0; }
};

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::etdrk4;
  bool dealias = true;
  SpongeLayer sponge;
  std::size_t record_every = 1;
  // Speed of the computational frame: the equation gains +s u_x.
  double frame_speed = 0.0;
  bool store_snapshots = true;
  double blowup_threshold = 1e6;

  // Throws std::invalid_argument; for imex_cn also requires
  // dt * kmax^3 <= pi so the Crank-Nicolson phase error stays bounded.
  void validate(const GridSpec& grid) const;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double t, double max_abs);
  double time() const { return time_; }

 private:
  double time_;
};

// u_t = -u_xxx - (u^2)_x + eps f(gamma t) u, evaluated spectrally.
Field kdv_rhs(const Field& u, double t, const ForcingSpec& forcing, bool dealias = true);

// Extra ODE carried alongside the PDE and advanced with matching stages
// (ETDRK4 reduces to classical RK4 for a zero linear part). Receives the
// stage time, stage field and its spectrum.
using AuxRhs = std::function<void(double t, const Field& u, std::span<const Complex> u_hat,
                                  std::span<const double> y, std::span<double> dy)>;

class Stepper {
 public:
  Stepper(const GridSpec& grid, const ForcingSpec& forcing, const SolverConfig& config);

  // Step size may be negative (time reversal).
  void set_step(double h);
  double step_size() const { return h_; }
  void set_frame_speed(double s);
  double frame_speed() const { return speed_; }
  // Clears multistep history (imex_cn).
  void reset();

  void step(Spectrum& u_hat, double t);
  void step(Spectrum& u_hat, double t, std::span<double> aux, const AuxRhs& aux_rhs);

  // Explicit part: nonlinearity, forcing and sponge. Fills u with the
  // physical field as a by-product.
  void explicit_terms(const Spectrum& u_hat, double t, Spectrum& out, Field& u) const;

 private:
  void rebuild();
  GridSpec grid_;
  ForcingSpec forcing_;
  SolverConfig config_;
  double h_;
  double speed_;
  std::vector<double> sponge_;
  std::vector<bool> keep_;
  std::vector<Complex> lin_, e_, e2_, q_, f1_, f2_, f3_;
  Spectrum prev_explicit_;
  bool have_prev_ = false;
};

struct InvariantSample {
  double mass_sq = 0.0;     // int u^2
  double hamiltonian = 0.0; // int u_x^2/2 - u^3/3
  double e2 = 0.0;          // int u_xx^2 - (10/3) u u_x^2 + (5/9) u^4
  double gradient_sq = 0.0; // int u_x^2
  double u_ux2 = 0.0;       // int u u_x^2
  double quartic = 0.0;     // int u^4
  double mass = 0.0;        // int u
};
InvariantSample compute_invariants(const Field& u);

struct FrameUpdate {
  double shift = 0.0;  // field is translated by -shift; frame origin moves by +shift
  double speed = 0.0;  // new frame speed
};

class Observer {
 public:
  virtual ~Observer() = default;
  // Called at every record time with the field in the computational frame
  // whose origin sits at frame_offset in lab coordinates.
  virtual std::optional<FrameUpdate> on_record(double t, const Field& u, double frame_offset) = 0;
};

struct Trajectory {
  GridSpec grid;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::vector<InvariantSample> invariants;
  std::vector<double> frame_offset;
};

// Integrates to time T with T/dt rounded up to whole steps (dt adjusted
// down to fit). Throws BlowUpError if |u| exceeds the threshold.
Trajectory simulate(const Field& u0, double T, const ForcingSpec& forcing, const SolverConfig& config,
                    Observer* observer = nullptr);

struct IdentityReport {
  double mass_sq_law = 0.0;        // max rel |N - N0 exp(2 eps int f)|
  double momentum_law = 0.0;       // max rel |int u - int u0 exp(eps int f)|
  double hamiltonian_identity = 0.0;
  double e2_identity = 0.0;
  double mass_sq_drift = 0.0;      // max |N - N0| / N0
  double hamiltonian_drift = 0.0;  // max |H - H0| / |H0|
};
// Time derivatives by fourth-order central differences on the record
// times, which must be uniformly spaced (at least five records).
IdentityReport identity_monitor(const Trajectory& traj, const ForcingSpec& forcing);
IdentityReport identity_monitor(const std::vector<double>& times, const std::vector<InvariantSample>& inv,
                                const ForcingSpec& forcing);

}  // namespace fkdv
