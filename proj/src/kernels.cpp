#include "fkdv/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fkdv::kernels {

namespace {

inline double weight_exponent(double x, double w_minus, double w_plus) {
  return 2.0 * (x < 0.0 ? w_minus : w_plus) * x;
}

void check_sizes(const GridSpec& grid, std::size_t a, std::size_t b) {
  if (a != grid.num_points || b != grid.num_points)
    throw std::invalid_argument("weighted_dot: array length does not match grid");
}

// Value of the interpolant at one point. Coefficient j > 0 contributes twice
// (it stands for j and -j); the Nyquist term is real cos only.
inline double interp_point(const GridSpec& grid, std::span<const Complex> coeffs, double x, bool zero_outside) {
  const double L = grid.half_length;
  if (zero_outside && (x < -L || x >= L)) return 0.0;
  const std::size_t n = grid.num_points;
  const std::size_t nyq = n / 2;
  // Coefficients refer to node positions measured from x_0 = -L.
  const double theta = std::numbers::pi * (x + L) / L;
  const Complex step(std::cos(theta), std::sin(theta));
  Complex rot(1.0, 0.0);
  double acc = coeffs[0].real();
  for (std::size_t j = 1; j < nyq; ++j) {
    rot *= step;
    if ((j & 63u) == 0) rot = Complex(std::cos(theta * j), std::sin(theta * j));
    acc += 2.0 * (coeffs[j] * rot).real();
  }
  acc += coeffs[nyq].real() * std::cos(theta * static_cast<double>(nyq));
  return acc / static_cast<double>(n);
}

inline double diff_entry(std::size_t i, std::size_t j, std::size_t n, double scale) {
  if (i == j) return 0.0;
  const long d = static_cast<long>(i) - static_cast<long>(j);
  const double sign = (d % 2 == 0) ? 1.0 : -1.0;
  return scale * 0.5 * sign / std::tan(std::numbers::pi * static_cast<double>(d) / static_cast<double>(n));
}

}  // namespace

double weighted_dot(const GridSpec& grid, std::span<const double> f, std::span<const double> g,
                    double w_minus, double w_plus) {
  check_sizes(grid, f.size(), g.size());
  const long n = static_cast<long>(grid.num_points);
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
  for (long i = 0; i < n; ++i) {
    const double x = grid.x(static_cast<std::size_t>(i));
    sum += std::exp(weight_exponent(x, w_minus, w_plus)) * f[i] * g[i];
  }
  return sum;
}

void trig_interpolate(const GridSpec& grid, std::span<const Complex> coeffs, std::span<const double> points,
                      std::span<double> out, bool zero_outside) {
  if (coeffs.size() != grid.num_modes() || out.size() != points.size())
    throw std::invalid_argument("trig_interpolate: size mismatch");
  const long m = static_cast<long>(points.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) out[i] = interp_point(grid, coeffs, points[i], zero_outside);
}

Eigen::MatrixXd diff_matrix(const GridSpec& grid) {
  const std::size_t n = grid.num_points;
  const double scale = std::numbers::pi / grid.half_length;
  Eigen::MatrixXd d(n, n);
  const long nl = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nl; ++j)
    for (std::size_t i = 0; i < n; ++i) d(i, j) = diff_entry(i, static_cast<std::size_t>(j), n, scale);
  return d;
}

namespace reference {

double weighted_dot(const GridSpec& grid, std::span<const double> f, std::span<const double> g,
                    double w_minus, double w_plus) {
  check_sizes(grid, f.size(), g.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.num_points; ++i) {
    const double x = grid.x(i);
    sum += std::exp(weight_exponent(x, w_minus, w_plus)) * f[i] * g[i];
  }
  return sum;
}

void trig_interpolate(const GridSpec& grid, std::span<const Complex> coeffs, std::span<const double> points,
                      std::span<double> out, bool zero_outside) {
  if (coeffs.size() != grid.num_modes() || out.size() != points.size())
    throw std::invalid_argument("trig_interpolate: size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = interp_point(grid, coeffs, points[i], zero_outside);
}

Eigen::MatrixXd diff_matrix(const GridSpec& grid) {
  const std::size_t n = grid.num_points;
  const double scale = std::numbers::pi / grid.half_length;
  Eigen::MatrixXd d(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) d(i, j) = diff_entry(i, j, n, scale);
  return d;
}

}  // namespace reference

}  // namespace fkdv::kernels
