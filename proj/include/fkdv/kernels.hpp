#pragma once

#include <Eigen/Dense>

#include <span>

#include "fkdv/grid.hpp"
#include "fkdv/spectral.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP version and a serial
// reference version with identical semantics; tests compare the two.
namespace fkdv::kernels {

// sum_i exp(2 w(x_i) x_i) f_i g_i with w = w_minus for x < 0, w_plus for x >= 0.
double weighted_dot(const GridSpec& grid, std::span<const double> f, std::span<const double> g,
                    double w_minus, double w_plus);

// Evaluates the trigonometric interpolant with half-complex coefficients
// (unnormalised FFT output) at arbitrary points. Points outside [-L, L) give
// zero when zero_outside is set and wrap periodically otherwise.
void trig_interpolate(const GridSpec& grid, std::span<const Complex> coeffs, std::span<const double> points,
                      std::span<double> out, bool zero_outside);

// Fourier collocation first-derivative matrix on the grid.
Eigen::MatrixXd diff_matrix(const GridSpec& grid);

namespace reference {
double weighted_dot(const GridSpec& grid, std::span<const double> f, std::span<const double> g,
                    double w_minus, double w_plus);
void trig_interpolate(const GridSpec& grid, std::span<const Complex> coeffs, std::span<const double> points,
                      std::span<double> out, bool zero_outside);
Eigen::MatrixXd diff_matrix(const GridSpec& grid);
}  // namespace reference

}  // namespace fkdv::kernels
