#include "fkdv/norms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fkdv/kernels.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "inner product");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid().spacing;
}

double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

double h1_norm(const Field& f) {
  const Field df = derivative(f, 1);
  return std::sqrt(inner_product(f, f) + inner_product(df, df));
}

void check_weight_range(const GridSpec& grid, const WeightPair& w) {
  auto check = [&](double v, const char* name) {
    if (!std::isfinite(v) || std::abs(v) * grid.half_length > kMaxWeightExponent) {
      std::ostringstream msg;
      msg << "weighted norm: weight " << name << " = " << v << " with half-length " << grid.half_length
          << " overflows (|w| L must be <= " << kMaxWeightExponent << ")";
      throw std::domain_error(msg.str());
    }
  };
  check(w.minus, "w_minus");
  check(w.plus, "w_plus");
}

double weighted_l2(const Field& f, const WeightPair& w) {
  check_weight_range(f.grid(), w);
  const double s = kernels::weighted_dot(f.grid(), f.values(), f.values(), w.minus, w.plus);
  return std::sqrt(s * f.grid().spacing);
}

double weighted_l2(const Field& f, double w) { return weighted_l2(f, WeightPair::symmetric(w)); }

WeightedH1Parts weighted_h1_parts(const Field& f, const WeightPair& w) {
  check_weight_range(f.grid(), w);
  const GridSpec& g = f.grid();
  Field shifted = derivative(f, 1);
  for (std::size_t i = 0; i < f.size(); ++i) shifted[i] += (g.x(i) < 0.0 ? w.minus : w.plus) * f[i];
  WeightedH1Parts parts;
  parts.value_sq = kernels::weighted_dot(g, f.values(), f.values(), w.minus, w.plus) * g.spacing;
  parts.derivative_sq = kernels::weighted_dot(g, shifted.values(), shifted.values(), w.minus, w.plus) * g.spacing;
  return parts;
}

double weighted_h1(const Field& f, const WeightPair& w) {
  const WeightedH1Parts p = weighted_h1_parts(f, w);
  return std::sqrt(p.value_sq + p.derivative_sq);
}

double weighted_h1(const Field& f, double w) { return weighted_h1(f, WeightPair::symmetric(w)); }

SplitField split_at_origin(const Field& f) {
  SplitField out{Field(f.grid()), Field(f.grid())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.grid().x(i) < 0.0)
      out.negative[i] = f[i];
    else
      out.positive[i] = f[i];
  }
  return out;
}

}  // namespace fkdv
