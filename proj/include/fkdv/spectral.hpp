#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fkdv/grid.hpp"

namespace fkdv {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

// Real-to-half-complex FFT pair for one transform size. Plans are created
// with FFTW_ESTIMATE so the chosen algorithm, and hence round-off, is
// reproducible from run to run.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  std::size_t size() const { return n_; }
  std::size_t num_modes() const { return n_ / 2 + 1; }

  // Unnormalised forward transform; out has n/2+1 entries.
  void forward(std::span<const double> in, std::span<Complex> out);
  // Inverse including the 1/n factor, so inverse(forward(f)) == f.
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

// Per-thread cached transform for size n.
FourierTransform& fourier_workspace(std::size_t n);

Spectrum to_spectrum(const Field& f);
Field from_spectrum(const GridSpec& grid, std::span<const Complex> coeffs);

// Multiplies coefficient j by (i k_j)^order; the Nyquist mode is dropped for
// odd orders since its derivative is not representable on the grid.
void differentiate_spectrum(const GridSpec& grid, std::span<Complex> coeffs, int order);
Field derivative(const Field& f, int order = 1);

// Returns x -> f(x - shift) for the band-limited interpolant of f.
Field translate(const Field& f, double shift);
void translate_spectrum(const GridSpec& grid, std::span<Complex> coeffs, double shift);

// Two-thirds rule: true for modes kept, |j| <= N/3.
std::vector<bool> dealias_mask(std::size_t n);
void apply_dealias(std::span<Complex> coeffs);

// Largest retained |k| with or without the two-thirds truncation.
double max_wavenumber(const GridSpec& grid, bool dealiased);

// Magnitude of the top 10% of modes relative to the largest one.
double spectral_tail(const Field& f);

}  // namespace fkdv
