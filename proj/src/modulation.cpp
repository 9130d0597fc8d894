#include "fkdv/modulation.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "fkdv/kernels.hpp"
#include "fkdv/norms.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

namespace {

double dot(const Field& a, const Field& b) { return inner_product(a, b); }

// sum_i x_i f_i' g_i h + 2 <f, g>: the pairing <(x d/dx + 2) f, g>.
double scaling_pairing(const Field& f, const Field& fx, const Field& g) {
  const GridSpec& grid = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += (grid.x(i) * fx[i] + 2.0 * f[i]) * g[i];
  return s * grid.spacing;
}

void check_alpha(double alpha, const AlphaRange& range) {
  if (!(alpha >= range.min && alpha <= range.max)) {
    std::ostringstream msg;
    msg << "rescale: alpha=" << alpha << " outside admissible range [" << range.min << ", " << range.max << "]";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

SolitonParams cold_guess(const Field& u) {
  const GridSpec& g = u.grid();
  std::size_t k = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] > u[k]) k = i;
  if (!(u[k] > 0.0)) throw ExtractionError("extract: field has no positive peak");
  const std::size_t n = u.size();
  const double ym = u[(k + n - 1) % n], y0 = u[k], yp = u[(k + 1) % n];
  const double denom = ym - 2.0 * y0 + yp;
  const double off = denom < 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
  const double peak = y0 - 0.25 * (ym - yp) * off;
  return {2.0 / 3.0 * peak, g.x(k) + off * g.spacing};
}

Decomposition extract(const Field& u, const SolitonParams& guess, double tol, int max_iter) {
  guess.validate();
  const GridSpec& g = u.grid();
  const Spectrum uh = to_spectrum(u);
  auto& fft = fourier_workspace(g.num_points);
  Spectrum work(uh.size());
  Field ut(g), utx(g);
  double c = guess.c, xi = guess.xi;

  auto centre = [&](double shift) {
    work = uh;
    translate_spectrum(g, work, -shift);
    fft.inverse(work, ut.values());
    differentiate_spectrum(g, work, 1);
    fft.inverse(work, utx.values());
  };

  Eigen::Vector2d F;
  for (int it = 0; it <= max_iter; ++it) {
    centre(xi);
    const SolitonTables p = sample_profiles(c, g);
    const Field diff = ut - p.phi;
    F << dot(diff, p.phi), dot(diff, p.zeta);
    if (F.cwiseAbs().maxCoeff() <= tol) {
      Decomposition d;
      d.c = c;
      d.xi = xi;
      d.centered = ut;
      d.vbar = diff;
      d.residual = {F(0), F(1)};
      d.iterations = it;
      return d;
    }
    if (it == max_iter) break;
    Eigen::Matrix2d J;
    J << dot(diff, p.dphi_dc) - dot(p.dphi_dc, p.phi), dot(utx, p.phi),
        dot(diff, p.dzeta_dc) - dot(p.dphi_dc, p.zeta), dot(utx, p.zeta);
    const double det = J.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) throw ExtractionError("extract: singular Newton matrix");
    Eigen::Vector2d step = -J.inverse() * F;
    // Keep c positive and the shift within a soliton width.
    double scale = 1.0;
    if (c + step(0) < 0.2 * c) scale = std::min(scale, 0.8 * c / std::abs(step(0)));
    const double width = 2.0 / std::sqrt(c);
    if (std::abs(step(1)) > width) scale = std::min(scale, width / std::abs(step(1)));
    c += scale * step(0);
    xi += scale * step(1);
    if (!std::isfinite(c) || !std::isfinite(xi)) throw ExtractionError("extract: Newton iterate is not finite");
  }
  std::ostringstream msg;
  msg << "extract: no convergence in " << max_iter << " iterations (residual " << F.cwiseAbs().maxCoeff()
      << ", c=" << c << ", xi=" << xi << ")";
  throw ExtractionError(msg.str());
}

Eigen::Matrix2d modulation_matrix(const Field& v, double c0) {
  const GridSpec& g = v.grid();
  const SolitonTables p = sample_profiles(c0, g);
  const Field full = p.phi + v;
  const Field vx = derivative(v, 1);
  const Field fullx = p.dphi_dx + vx;
  Eigen::Matrix2d K;
  K << scaling_pairing(full, fullx, p.phi), dot(vx, p.phi), scaling_pairing(full, fullx, p.zeta), dot(fullx, p.zeta);
  return K;
}

ModulationRates modulation_rates(double t, const Field& v, double alpha, double c0, const ForcingSpec& forcing) {
  const GridSpec& g = v.grid();
  const SolitonTables p = sample_profiles(c0, g);
  const Field full = p.phi + v;
  const Field vx = derivative(v, 1);
  Field nl(g);
  for (std::size_t i = 0; i < v.size(); ++i) nl[i] = -2.0 * v[i] * vx[i];
  const Eigen::Matrix2d K = modulation_matrix(v, c0);
  const Eigen::Vector2d base(dot(full, p.phi), dot(full, p.zeta));
  const Eigen::Vector2d nonlin(dot(nl, p.phi), dot(nl, p.zeta));
  const Eigen::Vector2d r = -alpha * forcing.amplitude(t) * K.lu().solve(base) - K.lu().solve(nonlin) / (alpha * alpha);
  return {r(0), r(1)};
}

PhysicalFrameTerms modulation_terms_physical(const Field& centered, const Field& centered_dx, double alpha,
                                             double c0) {
  const GridSpec& g = centered.grid();
  const double c = c0 / (alpha * alpha);
  const SolitonTables p = sample_profiles(c, g);
  double b1 = 0, b2 = 0, n1 = 0, n2 = 0, k11 = 0, k12 = 0, k21 = 0, k22 = 0;
  for (std::size_t i = 0; i < centered.size(); ++i) {
    const double u = centered[i], ux = centered_dx[i];
    const double vb = u - p.phi[i], vbx = ux - p.dphi_dx[i];
    const double nl = -2.0 * vb * vbx;
    const double scaled = g.x(i) * ux + 2.0 * u;
    b1 += u * p.phi[i];
    b2 += u * p.zeta[i];
    n1 += nl * p.phi[i];
    n2 += nl * p.zeta[i];
    k11 += scaled * p.phi[i];
    k12 += vbx * p.phi[i];
    k21 += scaled * p.zeta[i];
    k22 += ux * p.zeta[i];
  }
  const double h = g.spacing;
  const double a2 = alpha * alpha, a3 = a2 * alpha;
  PhysicalFrameTerms t;
  t.K << a3 * k11 * h, a3 * alpha * k12 * h, k21 * h, alpha * k22 * h;
  t.base << a3 * b1 * h, b2 * h;
  t.nonlinear << a3 * a3 * n1 * h, a3 * n2 * h;
  return t;
}

ModulationRates rates_from_terms(const PhysicalFrameTerms& terms, double alpha, double forcing_amplitude) {
  const auto lu = terms.K.partialPivLu();
  const Eigen::Vector2d r = -alpha * forcing_amplitude * lu.solve(terms.base) - lu.solve(terms.nonlinear) / (alpha * alpha);
  return {r(0), r(1)};
}

ModulationRates modulation_rates_physical(double t, const Field& centered, double alpha, double c0,
                                          const ForcingSpec& forcing) {
  const PhysicalFrameTerms terms = modulation_terms_physical(centered, derivative(centered, 1), alpha, c0);
  return rates_from_terms(terms, alpha, forcing.amplitude(t));
}

Field dilate(const Field& g, double beta) {
  const GridSpec& grid = g.grid();
  std::vector<double> pts(grid.num_points);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = beta * grid.x(i);
  const Spectrum s = to_spectrum(g);
  Field out(grid);
  kernels::trig_interpolate(grid, s, pts, out.values(), true);
  out *= beta * beta;
  return out;
}

Field rescale_to_moving_frame(const Field& u, double alpha, double xi, double c0, AlphaRange range) {
  check_alpha(alpha, range);
  Field v = dilate(translate(u, -xi), alpha);
  v -= sample_phi(c0, u.grid());
  return v;
}

Field rescale_from_moving_frame(const Field& v, double alpha, double xi, double c0, AlphaRange range) {
  check_alpha(alpha, range);
  Field full = v + sample_phi(c0, v.grid());
  return translate(dilate(full, 1.0 / alpha), xi);
}

double predicted_speed(const ForcingSpec& forcing, double c0, double t) {
  if (!(c0 > 0.0)) throw std::invalid_argument("predicted_speed: c0 must be positive");
  return c0 * std::exp(4.0 / 3.0 * forcing.log_growth(t));
}

std::vector<double> predicted_position(const ForcingSpec& forcing, double xi0, const std::vector<double>& times,
                                       const std::vector<double>& speeds) {
  if (times.size() != speeds.size()) throw std::invalid_argument("predicted_position: series length mismatch");
  std::vector<double> out(times.size());
  if (times.empty()) return out;
  double drift = 0.0, correction = 0.0;
  auto corr = [&](std::size_t i) { return forcing.amplitude(times[i]) / std::sqrt(speeds[i]); };
  out[0] = xi0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    drift += 0.5 * dt * (speeds[i] + speeds[i - 1]);
    correction += 0.5 * dt * (corr(i) + corr(i - 1));
    out[i] = xi0 + drift + 2.0 / 3.0 * correction;
  }
  return out;
}

double predicted_position(const ForcingSpec& forcing, double c0, double xi0, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("predicted_position: t must be finite and >= 0");
  if (t == 0.0) return xi0;
  auto integrand = [&](double s) {
    const double c = predicted_speed(forcing, c0, s);
    return c + 2.0 / 3.0 * forcing.amplitude(s) / std::sqrt(c);
  };
  using boost::math::quadrature::gauss_kronrod;
  return xi0 + gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 15, 1e-14);
}

double energy_difference(const Field& z, double c, double cubic) {
  const Field phi = sample_phi(c, z.grid());
  const Field zx = derivative(z, 1);
  double quad = 0, grad = 0, pot = 0, cub = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    quad += z[i] * z[i];
    grad += zx[i] * zx[i];
    pot += phi[i] * z[i] * z[i];
    cub += z[i] * z[i] * z[i];
  }
  const double h = z.grid().spacing;
  return h * (0.5 * c * quad + 0.5 * grad - pot + cubic * cub);
}

double augmented_energy(const Field& u, double c) {
  const Field ux = derivative(u, 1);
  double grad = 0, cub = 0, sq = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    grad += ux[i] * ux[i];
    cub += u[i] * u[i] * u[i];
    sq += u[i] * u[i];
  }
  const double h = u.grid().spacing;
  return h * (0.5 * grad - cub / 3.0 + 0.5 * c * sq);
}

EnergyDiagnostics energy_diagnostics(const Decomposition& d) {
  if (d.centered.size() == 0) throw std::invalid_argument("energy_diagnostics: empty decomposition");
  EnergyDiagnostics e;
  e.J = energy_difference(d.vbar, d.c);
  e.J_alt = augmented_energy(d.centered, d.c) - augmented_energy(sample_phi(d.c, d.centered.grid()), d.c);
  const double vb2 = inner_product(d.vbar, d.vbar);
  const double u2 = inner_product(d.centered, d.centered);
  e.pythagoras_defect = std::abs(vb2 - (u2 - 6.0 * d.c * std::sqrt(d.c)));
  return e;
}

}  // namespace fkdv
