#pragma once

#include "fkdv/grid.hpp"

namespace fkdv {

struct SolitonParams {
  double c = 1.0;
  double xi = 0.0;
  // Throws std::invalid_argument for c <= 0 or non-finite values.
  void validate() const;
};

// Pointwise profiles of the speed-c soliton centred at the origin,
// phi_c(x) = (3c/2) sech^2(sqrt(c) x / 2).
double phi(double c, double x);
double dphi_dx(double c, double x);
double dphi_dc(double c, double x);
// Antiderivative of dphi_dc vanishing at -infinity; tends to 3/sqrt(c) at +infinity.
double zeta(double c, double x);
double dzeta_dc(double c, double x);

// Centred samples of all profiles at one speed, computed in a single pass.
struct SolitonTables {
  Field phi;
  Field dphi_dx;
  Field dphi_dc;
  Field zeta;
  Field dzeta_dc;
};
SolitonTables sample_profiles(double c, const GridSpec& grid);

Field sample_phi(double c, const GridSpec& grid);
Field sample_dphi_dx(double c, const GridSpec& grid);
Field sample_dphi_dc(double c, const GridSpec& grid);
Field sample_zeta(double c, const GridSpec& grid);
// phi_c(x - xi): sampled centred and moved by spectral translation.
Field sample_phi_at(const SolitonParams& p, const GridSpec& grid);

// The adjoint kernel pair exactly as printed in the source analysis:
//   first  = (2/9) c^{-1/2} zeta_c + (2/9) c^{-2} phi_c
//   second = (2/9) c^{-1/2} phi_c
// Kept verbatim for auditing against the Gram-solved dual basis.
Field printed_adjoint_first(double c, const GridSpec& grid);
Field printed_adjoint_second(double c, const GridSpec& grid);

struct SolitonInvariants {
  double mass_sq = 0.0;       // int phi^2 = 6 c^{3/2}
  double gradient_sq = 0.0;   // int phi_x^2 = (6/5) c^{5/2}
  double hamiltonian = 0.0;   // int phi_x^2 / 2 - phi^3 / 3 = -(9/5) c^{5/2}
};
SolitonInvariants soliton_invariants(double c);

// Largest box half-length error: phi_c(L) / max phi_c. Grids must keep this
// below 1e-14 so that periodised tails are invisible.
double tail_ratio(double c, double half_length);

}  // namespace fkdv
