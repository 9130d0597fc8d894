#include "fkdv/linearized.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "fkdv/kernels.hpp"
#include "fkdv/norms.hpp"
#include "fkdv/soliton.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

namespace {

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Smooth periodic switch: about -1 on (-L, 0), +1 on (0, L), returning to 0
// at the box edge. Returns the value and its antiderivative from 0.
struct Switch {
  double value;
  double integral;
};

Switch periodic_switch(double x, double L, double width) {
  const double d = width;
  Switch s;
  s.value = std::tanh(x / d) - std::tanh((x - L) / d) - std::tanh((x + L) / d);
  s.integral = d * (log_cosh(x / d) - (log_cosh((x - L) / d) - log_cosh(-L / d)) -
                    (log_cosh((x + L) / d) - log_cosh(L / d)));
  return s;
}

void require_resolved(double c, const GridSpec& grid) {
  if (tail_ratio(c, grid.half_length) > 1e-10)
    throw std::invalid_argument("linearized: box too small for the soliton tail at this speed");
  const Field phi = sample_phi(c, grid);
  if (spectral_tail(phi) > 1e-10)
    throw std::invalid_argument("linearized: grid does not resolve the soliton at this speed");
}

Eigen::MatrixXd build(double c, const GridSpec& grid, const std::vector<double>& rate, bool with_potential) {
  const std::size_t n = grid.num_points;
  Eigen::MatrixXd d = kernels::diff_matrix(grid);
  for (std::size_t i = 0; i < n; ++i) d(i, i) -= rate[i];
  const Eigen::MatrixXd d2 = d * d;
  Eigen::MatrixXd a = -(d2 * d) + c * d;
  if (with_potential) {
    const Field phi = sample_phi(c, grid);
    // -2 d (phi .): scale the columns of d by phi.
    for (std::size_t j = 0; j < n; ++j) a.col(j) -= 2.0 * phi[j] * d.col(j);
  }
  return a;
}

}  // namespace

std::vector<double> OperatorMatrix::weight_function() const {
  std::vector<double> rho(grid.num_points);
  const double m = 0.5 * (weight.minus + weight.plus);
  const double h = 0.5 * (weight.plus - weight.minus);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double x = grid.x(i);
    double e = m * x;
    if (h != 0.0) e += h * periodic_switch(x, grid.half_length, transition_width).integral;
    rho[i] = std::exp(e);
  }
  return rho;
}

double OperatorMatrix::essential_edge() const {
  auto edge = [this](double w) { return -w * (c - w * w); };
  return std::max(edge(weight.minus), edge(weight.plus));
}

OperatorMatrix assemble_operator(double c, const GridSpec& grid, bool with_potential) {
  if (!(c > 0.0)) throw std::invalid_argument("linearized: c must be positive");
  if (with_potential) require_resolved(c, grid);
  OperatorMatrix op;
  op.grid = grid;
  op.c = c;
  op.rate.assign(grid.num_points, 0.0);
  op.matrix = build(c, grid, op.rate, with_potential);
  return op;
}

OperatorMatrix assemble_conjugated(double c, const GridSpec& grid, const WeightPair& w, double transition_width) {
  if (!(c > 0.0)) throw std::invalid_argument("linearized: c must be positive");
  const double bound = std::sqrt(c / 3.0);
  if (!(w.minus >= 0.0 && w.minus < bound && w.plus >= 0.0 && w.plus < bound))
    throw std::invalid_argument("linearized: weights must lie in [0, sqrt(c/3))");
  if (!(transition_width > 0.0)) throw std::invalid_argument("linearized: transition width must be positive");
  check_weight_range(grid, w);
  require_resolved(c, grid);
  OperatorMatrix op;
  op.grid = grid;
  op.c = c;
  op.weight = w;
  op.transition_width = transition_width;
  op.rate.resize(grid.num_points);
  const double m = 0.5 * (w.minus + w.plus);
  const double h = 0.5 * (w.plus - w.minus);
  for (std::size_t i = 0; i < grid.num_points; ++i)
    op.rate[i] = h == 0.0 ? w.plus : m + h * periodic_switch(grid.x(i), grid.half_length, transition_width).value;
  op.matrix = build(c, grid, op.rate, true);
  return op;
}

std::complex<double> conjugated_symbol(double c, double w, double k) {
  const std::complex<double> s(-w, k);
  return -s * s * s + c * s;
}

DualBasis dual_basis(double c, const GridSpec& grid) {
  const SolitonTables p = sample_profiles(c, grid);
  Eigen::Matrix2d G;
  G << inner_product(p.dphi_dx, p.phi), inner_product(p.dphi_dx, p.zeta), inner_product(p.dphi_dc, p.phi),
      inner_product(p.dphi_dc, p.zeta);
  if (std::abs(G.determinant()) < 1e-12) throw std::runtime_error("dual_basis: Gram matrix is singular");
  // Column i of G^{-1} holds the (phi, zeta) coefficients of partner i.
  const Eigen::Matrix2d inv = G.inverse();
  DualBasis b;
  b.c = c;
  b.coefficients = inv.transpose();
  b.first = b.coefficients(0, 0) * p.phi + b.coefficients(0, 1) * p.zeta;
  b.second = b.coefficients(1, 0) * p.phi + b.coefficients(1, 1) * p.zeta;
  b.dphi_dx = p.dphi_dx;
  b.dphi_dc = p.dphi_dc;
  return b;
}

Projection project(const Field& f, const DualBasis& basis) {
  require_same_grid(f.grid(), basis.first.grid(), "project");
  Projection pr;
  pr.along_dx = inner_product(f, basis.first);
  pr.along_dc = inner_product(f, basis.second);
  pr.parallel = pr.along_dx * basis.dphi_dx + pr.along_dc * basis.dphi_dc;
  pr.complement = f - pr.parallel;
  return pr;
}

SpectrumReport compute_spectrum(const OperatorMatrix& op, double zero_tol) {
  const int n = static_cast<int>(op.matrix.rows());
  Eigen::MatrixXd a = op.matrix;
  std::vector<double> wr(n), wi(n);
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), &dummy, 1,
                                        &dummy, 1);
  if (info != 0) throw std::runtime_error("compute_spectrum: eigenvalue solver failed (info " + std::to_string(info) + ")");
  SpectrumReport r;
  r.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) r.eigenvalues[i] = {wr[i], wi[i]};
  std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
            [](const auto& x, const auto& y) { return x.real() > y.real(); });
  r.rightmost_nonkernel_real = -std::numeric_limits<double>::infinity();
  for (const auto& z : r.eigenvalues) {
    if (std::abs(z) < zero_tol) {
      ++r.near_zero;
      r.kernel_radius = std::max(r.kernel_radius, std::abs(z));
    } else {
      r.rightmost_nonkernel_real = std::max(r.rightmost_nonkernel_real, z.real());
    }
  }
  return r;
}

Eigen::MatrixXd complement_projector(const OperatorMatrix& op) {
  const DualBasis b = dual_basis(op.c, op.grid);
  const std::size_t n = op.grid.num_points;
  const std::vector<double> rho = op.weight_function();
  Eigen::VectorXd r1(n), r2(n), l1(n), l2(n);
  for (std::size_t i = 0; i < n; ++i) {
    r1(i) = rho[i] * b.dphi_dx[i];
    r2(i) = rho[i] * b.dphi_dc[i];
    l1(i) = b.first[i] / rho[i] * op.grid.spacing;
    l2(i) = b.second[i] / rho[i] * op.grid.spacing;
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  q.noalias() -= r1 * l1.transpose();
  q.noalias() -= r2 * l2.transpose();
  return q;
}

std::vector<double> semigroup_norms(const OperatorMatrix& op, const std::vector<double>& times, int k) {
  if (k < 0 || k > 1) throw std::invalid_argument("semigroup_norms: derivative order must be 0 or 1");
  const std::size_t n = op.grid.num_points;
  const Eigen::MatrixXd q = complement_projector(op);
  Eigen::MatrixXd left = q;
  if (k == 1) {
    Eigen::MatrixXd d = kernels::diff_matrix(op.grid);
    for (std::size_t i = 0; i < n; ++i) d(i, i) -= op.rate[i];
    left = d * q;
  }
  std::vector<double> out;
  Eigen::MatrixXd current = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd increment;
  double prev_t = 0.0, prev_dt = -1.0;
  for (double t : times) {
    if (!(t > prev_t - 1e-15)) throw std::invalid_argument("semigroup_norms: times must be non-decreasing");
    const double dt = t - prev_t;
    if (dt > 0.0) {
      if (std::abs(dt - prev_dt) > 1e-12 * std::max(1.0, dt)) {
        increment = (op.matrix * dt).exp();
        prev_dt = dt;
      }
      current = increment * current;
    }
    prev_t = t;
    const Eigen::MatrixXd m = left * current * q;
    out.push_back(Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues()(0));
  }
  return out;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("least_squares: abscissae are all equal");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& norms) {
  std::vector<double> logs(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > 0.0)) throw std::invalid_argument("fit_decay: norms must be positive");
    logs[i] = std::log(norms[i]);
  }
  const LineFit f = least_squares(times, logs);
  return {std::exp(f.intercept), -f.slope};
}

double fit_loglog_slope(const std::vector<double>& times, const std::vector<double>& norms) {
  std::vector<double> lx(times.size()), ly(norms.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || !(norms[i] > 0.0)) throw std::invalid_argument("fit_loglog_slope: need positive data");
    lx[i] = std::log(times[i]);
    ly[i] = std::log(norms[i]);
  }
  return least_squares(lx, ly).slope;
}

}  // namespace fkdv
