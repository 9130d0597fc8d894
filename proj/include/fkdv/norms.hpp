#pragma once

#include "fkdv/grid.hpp"
#include "fkdv/weights.hpp"

namespace fkdv {

// Rectangle-rule quadrature on the periodic grid.
double inner_product(const Field& f, const Field& g);
double l2_norm(const Field& f);
double h1_norm(const Field& f);

// ||exp(w x) f||_{L^2}. Throws std::domain_error if |w| L would overflow.
double weighted_l2(const Field& f, double w);
double weighted_l2(const Field& f, const WeightPair& w);

// ||exp(w x) f||_{H^1}, i.e. the L^2 parts of exp(w x) f and of
// exp(w x) (f' + w f).
double weighted_h1(const Field& f, double w);
double weighted_h1(const Field& f, const WeightPair& w);

// Squared pieces of the weighted H^1 norm kept apart so that norms of a
// dilated field can be formed without resampling.
struct WeightedH1Parts {
  double value_sq = 0.0;
  double derivative_sq = 0.0;
};
WeightedH1Parts weighted_h1_parts(const Field& f, const WeightPair& w);

// f restricted to x < 0 and x >= 0 (zero elsewhere).
struct SplitField {
  Field negative;
  Field positive;
};
SplitField split_at_origin(const Field& f);

// Largest |w| L that keeps exp(2 w x) finite with headroom.
inline constexpr double kMaxWeightExponent = 350.0;
void check_weight_range(const GridSpec& grid, const WeightPair& w);

}  // namespace fkdv
