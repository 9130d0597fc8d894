#include "fkdv/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fkdv {

void WeightSchedule::validate() const {
  if (!(w_min > 0.0 && w_min < w_inf && w_inf < w))
    throw std::invalid_argument("weight schedule: need 0 < w_min < w_inf < w, got w_min=" + std::to_string(w_min) +
                                ", w_inf=" + std::to_string(w_inf) + ", w=" + std::to_string(w));
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("weight schedule: gamma must be non-negative");
}

double WeightSchedule::minus_at(double t) const {
  const double relax = -std::expm1(-gamma * t);
  return w_min * std::pow(w_inf / w_min, relax);
}

double WeightSchedule::plus_at(double t) const {
  const double relax = -std::expm1(-gamma * t);
  return w * std::pow(w_inf / w, relax);
}

WeightPair WeightSchedule::at(double t) const {
  if (t < 0.0) throw std::invalid_argument("weight schedule: time must be non-negative");
  return {minus_at(t), plus_at(t)};
}

WeightSchedule default_schedule(double w, double energy, double gamma) {
  // The binding side of the midpoint condition needs
  // log(w / w_inf) >= (2/3) E (1 + e^{gamma delta / 2}); with gamma delta <= 1
  // that is at most (2/3) E (1 + e^{1/2}). Twenty percent headroom on top.
  const double spread = 1.2 * (2.0 / 3.0) * energy * (1.0 + std::exp(0.5));
  WeightSchedule s;
  s.w = w;
  s.w_inf = w * std::exp(-spread);
  s.w_min = s.w_inf * std::exp(-spread);
  s.gamma = gamma;
  s.validate();
  return s;
}

double q_factor(const WeightSchedule& sched, double t, double s, double delta) {
  if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("q_factor: need 0 <= s <= t");
  if (!(delta > 0.0)) throw std::invalid_argument("q_factor: delta must be positive");
  sched.validate();
  if (!(sched.gamma > 0.0)) throw std::invalid_argument("q_factor: schedule is constant (gamma = 0)");
  const double mid = t + 0.5 * delta;
  const double dm = sched.minus_at(mid) - sched.minus_at(s);
  const double dp = sched.plus_at(s) - sched.plus_at(mid);
  return 1.0 / dm + 1.0 / dp;
}

SupResult sup_weighted_q(const WeightSchedule& sched, double t, double delta) {
  auto g = [&](double s) { return std::exp(-sched.gamma * s) * q_factor(sched, t, s, delta); };
  const int n = 400;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double v = g(t * i / n);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = t * std::max(0, best - 1) / n;
  double b = t * std::min(n, best + 1) / n;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, t); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = g(x1);
    }
  }
  SupResult r{best_val, t * best / n};
  for (double s : {a, b, 0.5 * (a + b)}) {
    const double v = g(s);
    if (v > r.value) r = {v, s};
  }
  return r;
}

double q_bound_ratio(const WeightSchedule& sched, double t, double delta) {
  const double sup = sup_weighted_q(sched, t, delta).value;
  return sup * sched.gamma * delta / std::exp(0.5 * sched.gamma * delta);
}

double midpoint_margin(const WeightSchedule& sched, const std::vector<double>& times,
                       const std::vector<double>& alphas, double delta) {
  if (times.size() != alphas.size()) throw std::invalid_argument("midpoint_margin: series length mismatch");
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size() && times[j] - times[i] <= delta * (1.0 + 1e-12); ++j) {
      const double t = times[i];
      const double s = times[j] - t;
      const double log_alpha = std::log(alphas[i] / alphas[j]);
      const double lower = std::log(sched.minus_at(t + 0.5 * s) / sched.minus_at(t + s));
      const double upper = std::log(sched.plus_at(t + 0.5 * s) / sched.plus_at(t + s));
      margin = std::min({margin, log_alpha - lower, upper - log_alpha});
    }
  }
  return margin;
}

}  // namespace fkdv
