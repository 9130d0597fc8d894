#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fkdv/grid.hpp"

namespace fkdv::testing {

// Sum of a few Gaussian bumps with random centres, widths and signs.
inline Field random_smooth(const GridSpec& g, std::uint64_t seed, double spread = 8.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-spread, spread), width(0.8, 2.0), amp(-1.0, 1.0);
  Field f(g);
  for (int k = 0; k < 5; ++k) {
    const double x0 = centre(rng), s = width(rng), a = amp(rng);
    for (std::size_t i = 0; i < g.num_points; ++i) {
      const double z = (g.x(i) - x0) / s;
      f[i] += a * std::exp(-z * z);
    }
  }
  return f;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace fkdv::testing
