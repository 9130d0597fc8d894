#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "fkdv/grid.hpp"
#include "fkdv/weights.hpp"

namespace fkdv {

// Dense collocation matrix of -d^3 + c d - 2 d(phi_c .), optionally
// conjugated by a weight rho(x) (rho A rho^{-1}, i.e. d -> d - r(x) with
// r = rho'/rho).
struct OperatorMatrix {
  GridSpec grid;
  double c = 1.0;
  WeightPair weight;
  double transition_width = 0.0;
  Eigen::MatrixXd matrix;
  std::vector<double> rate;  // r(x_i)

  std::vector<double> weight_function() const;  // rho(x_i)
  // Edge of the essential spectrum, min over the two far-field rates of -w (c - w^2).
  double essential_edge() const;
};

OperatorMatrix assemble_operator(double c, const GridSpec& grid, bool with_potential = true);
// Symmetric weights conjugate exactly (r = w). Asymmetric weights use a
// smooth periodic switch of width transition_width between the two rates,
// with a second switch at the box edge.
OperatorMatrix assemble_conjugated(double c, const GridSpec& grid, const WeightPair& w,
                                   double transition_width = 1.0);

// Symbol of the constant-coefficient part after conjugation by e^{w x}:
// -(ik - w)^3 + c (ik - w).
std::complex<double> conjugated_symbol(double c, double w, double k);

// Biorthogonal partners of (phi_c', d phi_c / dc) inside span{zeta_c, phi_c},
// found by solving the 2x2 Gram system on the grid.
struct DualBasis {
  double c = 0.0;
  Field first;   // pairs to 1 with phi_c', 0 with d phi_c / dc
  Field second;  // pairs to 0 with phi_c', 1 with d phi_c / dc
  // first = coef(0,0) phi_c + coef(0,1) zeta_c; second likewise in row 1.
  Eigen::Matrix2d coefficients;
  Field dphi_dx;
  Field dphi_dc;
};
DualBasis dual_basis(double c, const GridSpec& grid);

struct Projection {
  Field parallel;    // P f
  Field complement;  // Q f = f - P f
  double along_dx = 0.0;
  double along_dc = 0.0;
};
Projection project(const Field& f, const DualBasis& basis);

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;  // sorted by decreasing real part
  int near_zero = 0;
  double kernel_radius = 0.0;            // largest |lambda| among the near-zero ones
  double rightmost_nonkernel_real = 0.0;
};
SpectrumReport compute_spectrum(const OperatorMatrix& op, double zero_tol = 1e-6);

// Projection onto the complement of the generalised kernel, in the
// coordinates of op (conjugated if op carries a weight).
Eigen::MatrixXd complement_projector(const OperatorMatrix& op);

// Operator norms of d^k Q e^{A t} Q in the weighted L^2 space for each time
// (matrix 2-norms in conjugated coordinates). Equal successive time steps
// reuse one exponential.
std::vector<double> semigroup_norms(const OperatorMatrix& op, const std::vector<double>& times, int k = 0);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct DecayFit {
  double M = 0.0;
  double beta = 0.0;
};
// log ||.|| = log M - beta t.
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& norms);
// Slope of log ||.|| against log t.
double fit_loglog_slope(const std::vector<double>& times, const std::vector<double>& norms);

}  // namespace fkdv
