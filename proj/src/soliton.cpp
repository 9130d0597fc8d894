#include "fkdv/soliton.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fkdv/spectral.hpp"

namespace fkdv {

namespace {

void require_speed(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("soliton: speed must be positive and finite, got " + std::to_string(c));
}

// sech^2(u), tanh(u) and 1 + tanh(u) without overflow or cancellation.
struct Hyperbolic {
  double sech2;
  double tanh;
  double one_plus_tanh;
};

Hyperbolic hyperbolic(double u) {
  const double e = std::exp(-2.0 * std::abs(u));
  const double denom = 1.0 + e;
  Hyperbolic h;
  h.sech2 = 4.0 * e / (denom * denom);
  const double t = (1.0 - e) / denom;
  h.tanh = u < 0.0 ? -t : t;
  h.one_plus_tanh = u < 0.0 ? 2.0 * e / denom : 1.0 + t;
  return h;
}

struct Values {
  double phi, dphi_dx, dphi_dc, zeta, dzeta_dc;
};

Values evaluate(double c, double x) {
  const double rc = std::sqrt(c);
  const double u = 0.5 * rc * x;
  const Hyperbolic h = hyperbolic(u);
  Values v;
  v.phi = 1.5 * c * h.sech2;
  v.dphi_dx = -1.5 * c * rc * h.sech2 * h.tanh;
  v.dphi_dc = 1.5 * h.sech2 - 0.75 * rc * x * h.sech2 * h.tanh;
  v.zeta = 1.5 / rc * h.one_plus_tanh + 0.75 * x * h.sech2;
  v.dzeta_dc = -0.75 / (c * rc) * h.one_plus_tanh + 0.375 * x / c * h.sech2 -
               0.375 * x * x / rc * h.sech2 * h.tanh;
  return v;
}

}  // namespace

void SolitonParams::validate() const {
  require_speed(c);
  if (!std::isfinite(xi)) throw std::invalid_argument("soliton: position must be finite");
}

double phi(double c, double x) {
  require_speed(c);
  return evaluate(c, x).phi;
}
double dphi_dx(double c, double x) {
  require_speed(c);
  return evaluate(c, x).dphi_dx;
}
double dphi_dc(double c, double x) {
  require_speed(c);
  return evaluate(c, x).dphi_dc;
}
double zeta(double c, double x) {
  require_speed(c);
  return evaluate(c, x).zeta;
}
double dzeta_dc(double c, double x) {
  require_speed(c);
  return evaluate(c, x).dzeta_dc;
}

SolitonTables sample_profiles(double c, const GridSpec& grid) {
  require_speed(c);
  SolitonTables t{Field(grid), Field(grid), Field(grid), Field(grid), Field(grid)};
  for (std::size_t i = 0; i < grid.num_points; ++i) {
    const Values v = evaluate(c, grid.x(i));
    t.phi[i] = v.phi;
    t.dphi_dx[i] = v.dphi_dx;
    t.dphi_dc[i] = v.dphi_dc;
    t.zeta[i] = v.zeta;
    t.dzeta_dc[i] = v.dzeta_dc;
  }
  return t;
}

Field sample_phi(double c, const GridSpec& grid) {
  require_speed(c);
  return Field::sample(grid, [c](double x) { return evaluate(c, x).phi; });
}
Field sample_dphi_dx(double c, const GridSpec& grid) {
  require_speed(c);
  return Field::sample(grid, [c](double x) { return evaluate(c, x).dphi_dx; });
}
Field sample_dphi_dc(double c, const GridSpec& grid) {
  require_speed(c);
  return Field::sample(grid, [c](double x) { return evaluate(c, x).dphi_dc; });
}
Field sample_zeta(double c, const GridSpec& grid) {
  require_speed(c);
  return Field::sample(grid, [c](double x) { return evaluate(c, x).zeta; });
}

Field sample_phi_at(const SolitonParams& p, const GridSpec& grid) {
  p.validate();
  return translate(sample_phi(p.c, grid), p.xi);
}

Field printed_adjoint_first(double c, const GridSpec& grid) {
  const double a = (2.0 / 9.0) / std::sqrt(c);
  const double b = (2.0 / 9.0) / (c * c);
  return a * sample_zeta(c, grid) + b * sample_phi(c, grid);
}

Field printed_adjoint_second(double c, const GridSpec& grid) {
  return ((2.0 / 9.0) / std::sqrt(c)) * sample_phi(c, grid);
}

SolitonInvariants soliton_invariants(double c) {
  require_speed(c);
  const double r = std::sqrt(c);
  return {6.0 * c * r, 1.2 * c * c * r, -1.8 * c * c * r};
}

double tail_ratio(double c, double half_length) {
  require_speed(c);
  return evaluate(c, half_length).phi / (1.5 * c);
}

}  // namespace fkdv
