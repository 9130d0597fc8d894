#include "fkdv/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fkdv {

namespace {
// FFTW's planner is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FourierTransform::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

FourierTransform::FourierTransform(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("fourier transform: size must be even");
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->real = fftw_alloc_real(n);
  plans_->spec = fftw_alloc_complex(n / 2 + 1);
  const int ni = static_cast<int>(n);
  plans_->fwd = fftw_plan_dft_r2c_1d(ni, plans_->real, plans_->spec, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_dft_c2r_1d(ni, plans_->spec, plans_->real, FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->inv) throw std::runtime_error("fourier transform: FFTW planning failed");
}

FourierTransform::~FourierTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->inv);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
}

void FourierTransform::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != n_ || out.size() != num_modes())
    throw std::invalid_argument("fourier transform: forward size mismatch");
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  const auto* s = reinterpret_cast<const Complex*>(plans_->spec);
  std::copy(s, s + num_modes(), out.begin());
}

void FourierTransform::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != num_modes() || out.size() != n_)
    throw std::invalid_argument("fourier transform: inverse size mismatch");
  auto* s = reinterpret_cast<Complex*>(plans_->spec);
  std::copy(in.begin(), in.end(), s);
  fftw_execute(plans_->inv);
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = plans_->real[i] * scale;
}

FourierTransform& fourier_workspace(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FourierTransform>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<FourierTransform>(n)).first;
  return *it->second;
}

Spectrum to_spectrum(const Field& f) {
  Spectrum out(f.grid().num_modes());
  fourier_workspace(f.size()).forward(f.values(), out);
  return out;
}

Field from_spectrum(const GridSpec& grid, std::span<const Complex> coeffs) {
  Field out(grid);
  fourier_workspace(grid.num_points).inverse(coeffs, out.values());
  return out;
}

void differentiate_spectrum(const GridSpec& grid, std::span<Complex> coeffs, int order) {
  if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
  if (order == 0) return;
  const std::size_t nyq = grid.num_points / 2;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const Complex ik(0.0, grid.wavenumber(j));
    Complex factor(1.0, 0.0);
    for (int p = 0; p < order; ++p) factor *= ik;
    coeffs[j] *= factor;
  }
  if (order % 2 == 1) coeffs[nyq] = 0.0;
}

Field derivative(const Field& f, int order) {
  Spectrum s = to_spectrum(f);
  differentiate_spectrum(f.grid(), s, order);
  return from_spectrum(f.grid(), s);
}

void translate_spectrum(const GridSpec& grid, std::span<Complex> coeffs, double shift) {
  const std::size_t nyq = grid.num_points / 2;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double phase = -grid.wavenumber(j) * shift;
    coeffs[j] *= Complex(std::cos(phase), std::sin(phase));
  }
  coeffs[nyq] = 0.0;
}

Field translate(const Field& f, double shift) {
  Spectrum s = to_spectrum(f);
  translate_spectrum(f.grid(), s, shift);
  return from_spectrum(f.grid(), s);
}

std::vector<bool> dealias_mask(std::size_t n) {
  std::vector<bool> keep(n / 2 + 1);
  for (std::size_t j = 0; j < keep.size(); ++j) keep[j] = 3 * j <= n;
  return keep;
}

void apply_dealias(std::span<Complex> coeffs) {
  const std::size_t n = 2 * (coeffs.size() - 1);
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    if (3 * j > n) coeffs[j] = 0.0;
}

double max_wavenumber(const GridSpec& grid, bool dealiased) {
  const std::size_t jmax = dealiased ? grid.num_points / 3 : grid.num_points / 2;
  return grid.wavenumber(jmax);
}

double spectral_tail(const Field& f) {
  const Spectrum s = to_spectrum(f);
  double peak = 0.0;
  for (const auto& z : s) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return 0.0;
  double tail = 0.0;
  const std::size_t start = s.size() - s.size() / 10;
  for (std::size_t j = start; j < s.size(); ++j) tail = std::max(tail, std::abs(s[j]));
  return tail / peak;
}

}  // namespace fkdv
