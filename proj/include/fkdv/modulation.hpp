#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <vector>

#include "fkdv/forcing.hpp"
#include "fkdv/grid.hpp"
#include "fkdv/soliton.hpp"

namespace fkdv {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// u = phi_c(. - xi) + vbar(. - xi) with vbar orthogonal to phi_c and zeta_c.
struct Decomposition {
  double c = 0.0;
  double xi = 0.0;
  Field centered;  // u(. + xi)
  Field vbar;      // centered - phi_c
  std::array<double, 2> residual{};
  int iterations = 0;
};

// Speed from the peak height, position from a parabolic fit around the peak.
SolitonParams cold_guess(const Field& u);

// Newton iteration on (<u(.+xi) - phi_c, phi_c>, <u(.+xi) - phi_c, zeta_c>).
// Throws ExtractionError if the residual does not drop below tol.
Decomposition extract(const Field& u, const SolitonParams& guess, double tol = 1e-12, int max_iter = 50);

// Matrix of the modulation system in the rescaled frame (v = perturbation of
// phi_{c0}); x d/dx uses the grid coordinate.
Eigen::Matrix2d modulation_matrix(const Field& v, double c0);

struct ModulationRates {
  double alpha_t = 0.0;
  double omega_t = 0.0;
};

// Right-hand side of the (alpha, Omega) system from the rescaled perturbation.
ModulationRates modulation_rates(double t, const Field& v, double alpha, double c0, const ForcingSpec& forcing);

// The same rates evaluated from the physical field recentred at the soliton,
// centered = u(. + xi), using c = c0 / alpha^2. Avoids resampling the dilated
// frame; the pairings pick up the powers of alpha of the change of variables.
struct PhysicalFrameTerms {
  Eigen::Matrix2d K;
  Eigen::Vector2d base;       // pairings of phi_{c0} + v with phi_{c0}, zeta_{c0}
  Eigen::Vector2d nonlinear;  // pairings of N(v)
};
PhysicalFrameTerms modulation_terms_physical(const Field& centered, const Field& centered_dx, double alpha, double c0);
ModulationRates modulation_rates_physical(double t, const Field& centered, double alpha, double c0,
                                          const ForcingSpec& forcing);
ModulationRates rates_from_terms(const PhysicalFrameTerms& terms, double alpha, double forcing_amplitude);

// Admissible dilation factors; outside this range the rescaled field is no
// longer resolved on the same grid.
struct AlphaRange {
  double min = 0.5;
  double max = 2.0;
};

// beta^2 g(beta x), band-limited evaluation, zero where beta x leaves the box.
Field dilate(const Field& g, double beta);
// v(x) = alpha^2 u(alpha x + xi) - phi_{c0}(x).
Field rescale_to_moving_frame(const Field& u, double alpha, double xi, double c0, AlphaRange range = {});
// Inverse map: u(y) = alpha^-2 (v + phi_{c0})((y - xi) / alpha).
Field rescale_from_moving_frame(const Field& v, double alpha, double xi, double c0, AlphaRange range = {});

// c_ap(t) = c0 exp((4/3) E int_0^{gamma t} f); t may be +infinity.
double predicted_speed(const ForcingSpec& forcing, double c0, double t);
// xi0 + int_0^t c + (2/3) eps int_0^t f(gamma s) / sqrt(c(s)) ds with the
// supplied speed series (trapezoid rule).
std::vector<double> predicted_position(const ForcingSpec& forcing, double xi0, const std::vector<double>& times,
                                       const std::vector<double>& speeds);
// Same with c = c_ap, integrated adaptively.
double predicted_position(const ForcingSpec& forcing, double c0, double xi0, double t);

// (c/2)||z||^2 + ||z'||^2 / 2 - int phi_c z^2 + cubic * int z^3. The exact
// expansion of E_c[phi_c + z] - E_c[phi_c] has cubic = -1/3.
double energy_difference(const Field& z, double c, double cubic = -1.0 / 3.0);
// E_c[u] = H[u] + (c/2) N[u].
double augmented_energy(const Field& u, double c);

struct EnergyDiagnostics {
  double J = 0.0;            // from the perturbation
  double J_alt = 0.0;        // E_c[u] - E_c[phi_c]
  double pythagoras_defect = 0.0;  // | ||vbar||^2 - (||u||^2 - 6 c^{3/2}) |
};
EnergyDiagnostics energy_diagnostics(const Decomposition& d);

}  // namespace fkdv
