#pragma once

#include <vector>

namespace fkdv {

// Exponential weight exp(w(x) x) with w = minus on x < 0 and plus on x >= 0.
struct WeightPair {
  double minus = 0.0;
  double plus = 0.0;

  static WeightPair symmetric(double w) { return {w, w}; }
  bool is_symmetric() const { return minus == plus; }
};

// Time-dependent asymmetric weights. At forcing time tau = gamma t,
//   minus(tau) = w_min (w_inf / w_min)^(1 - e^-tau),
//   plus(tau)  = w     (w_inf / w)^(1 - e^-tau),
// so minus rises from w_min and plus falls from w, both towards w_inf.
struct WeightSchedule {
  double w_min = 0.0;
  double w = 0.0;
  double w_inf = 0.0;
  double gamma = 0.0;

  // Throws std::invalid_argument unless 0 < w_min < w_inf < w and gamma >= 0.
  void validate() const;
  WeightPair at(double t) const;
  double minus_at(double t) const;
  double plus_at(double t) const;
};

// Default limits for a given forcing energy: w_inf sits a fixed factor below w
// so that the midpoint separation condition holds with margin, and w_min
// mirrors it geometrically below w_inf.
WeightSchedule default_schedule(double w, double energy, double gamma);

// q(t, s, delta) = 1 / (minus(t + delta/2) - minus(s)) + 1 / (plus(s) - plus(t + delta/2))
double q_factor(const WeightSchedule& sched, double t, double s, double delta);

struct SupResult {
  double value = 0.0;
  double argmax = 0.0;
};

// sup over s in [0, t] of exp(-gamma s) q(t, s, delta), by coarse scan plus
// golden-section refinement.
SupResult sup_weighted_q(const WeightSchedule& sched, double t, double delta);

// Ratio sup_s(...) * gamma * delta / exp(gamma delta / 2); bounded by a
// constant independent of t when the weights are admissible.
double q_bound_ratio(const WeightSchedule& sched, double t, double delta);

// Midpoint condition on a recorded alpha series: for every pair of records
// t < t + s with s <= delta,
//   minus(t + s/2) / minus(t + s) <= alpha(t) / alpha(t + s) <= plus(t + s/2) / plus(t + s).
// Returns the smallest log-margin over all pairs (non-negative means satisfied).
double midpoint_margin(const WeightSchedule& sched, const std::vector<double>& times,
                       const std::vector<double>& alphas, double delta);

}  // namespace fkdv
