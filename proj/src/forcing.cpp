#include "fkdv/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fkdv {

ForcingProfile ForcingProfile::none() { return ForcingProfile(); }

ForcingProfile ForcingProfile::exp_decay(double scale) {
  if (!std::isfinite(scale)) throw std::invalid_argument("forcing: scale must be finite");
  ForcingProfile p;
  p.kind_ = Kind::exp_decay;
  p.scale_ = scale;
  return p;
}

ForcingProfile ForcingProfile::tabulated(std::vector<double> tau, std::vector<double> values) {
  if (tau.size() < 2 || tau.size() != values.size())
    throw std::invalid_argument("forcing: table needs at least two (tau, f) samples of equal length");
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!std::isfinite(tau[i]) || !std::isfinite(values[i]))
      throw std::invalid_argument("forcing: table entries must be finite");
    if (i > 0 && !(tau[i] > tau[i - 1])) throw std::invalid_argument("forcing: table abscissae must increase");
  }
  if (tau.front() < 0.0) throw std::invalid_argument("forcing: table must start at tau >= 0");
  ForcingProfile p;
  p.kind_ = Kind::tabulated;
  p.scale_ = 1.0;
  const std::size_t n = tau.size();
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) secant[k] = (values[k + 1] - values[k]) / (tau[k + 1] - tau[k]);
  std::vector<double> m(n);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) m[k] = secant[k - 1] * secant[k] <= 0.0 ? 0.0 : 0.5 * (secant[k - 1] + secant[k]);
  // Fritsch-Carlson limiter keeps each segment monotone.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (secant[k] == 0.0) {
      m[k] = m[k + 1] = 0.0;
      continue;
    }
    const double a = m[k] / secant[k];
    const double b = m[k + 1] / secant[k];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      m[k] = t * a * secant[k];
      m[k + 1] = t * b * secant[k];
    }
  }
  p.tau_ = std::move(tau);
  p.values_ = std::move(values);
  p.slopes_ = std::move(m);
  p.cumulative_.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k)
    p.cumulative_[k + 1] = p.cumulative_[k] + p.segment_integral(k, p.tau_[k + 1]);
  return p;
}

std::string ForcingProfile::name() const {
  switch (kind_) {
    case Kind::none: return "none";
    case Kind::exp_decay: return "exp_decay";
    case Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

double ForcingProfile::value(double tau) const {
  switch (kind_) {
    case Kind::none: return 0.0;
    case Kind::exp_decay: return scale_ * std::exp(-tau);
    case Kind::tabulated: {
      if (tau < tau_.front() || tau > tau_.back()) return 0.0;
      const std::size_t k = std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(tau_.begin(), tau_.end(), tau) - tau_.begin()) - 1,
          tau_.size() - 2);
      const double h = tau_[k + 1] - tau_[k];
      const double s = (tau - tau_[k]) / h;
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
      const double h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s);
      const double h11 = s * s * (s - 1);
      return h00 * values_[k] + h10 * h * slopes_[k] + h01 * values_[k + 1] + h11 * h * slopes_[k + 1];
    }
  }
  return 0.0;
}

// Exact integral of the cubic Hermite segment k from tau_k to upto.
double ForcingProfile::segment_integral(std::size_t k, double upto) const {
  const double h = tau_[k + 1] - tau_[k];
  const double s = (upto - tau_[k]) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  const double i00 = s - s3 + 0.5 * s4;
  const double i10 = 0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4;
  const double i01 = s3 - 0.5 * s4;
  const double i11 = 0.25 * s4 - s3 / 3.0;
  return h * (i00 * values_[k] + i10 * h * slopes_[k] + i01 * values_[k + 1] + i11 * h * slopes_[k + 1]);
}

double ForcingProfile::integral(double tau) const {
  if (tau < 0.0) throw std::invalid_argument("forcing: integral needs tau >= 0");
  switch (kind_) {
    case Kind::none: return 0.0;
    case Kind::exp_decay: return std::isinf(tau) ? scale_ : -scale_ * std::expm1(-tau);
    case Kind::tabulated: {
      if (tau <= tau_.front()) return 0.0;
      if (tau >= tau_.back()) return cumulative_.back();
      const std::size_t k = static_cast<std::size_t>(std::upper_bound(tau_.begin(), tau_.end(), tau) - tau_.begin()) - 1;
      return cumulative_[k] + segment_integral(k, tau);
    }
  }
  return 0.0;
}

bool ForcingProfile::satisfies_decay_bound() const {
  switch (kind_) {
    case Kind::none: return true;
    case Kind::exp_decay: return std::abs(scale_) <= 1.0;
    case Kind::tabulated: {
      // Check on a refined grid between samples as well.
      for (std::size_t k = 0; k + 1 < tau_.size(); ++k)
        for (int j = 0; j <= 16; ++j) {
          const double t = tau_[k] + (tau_[k + 1] - tau_[k]) * j / 16.0;
          if (std::abs(value(t)) > std::exp(-t) * (1.0 + 1e-12)) return false;
        }
      return true;
    }
  }
  return false;
}

void ForcingSpec::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("forcing: epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  if (!(energy > 0.0) || !std::isfinite(energy))
    throw std::invalid_argument("forcing: E must be positive, got " + std::to_string(energy));
}

double ForcingSpec::log_growth(double t) const {
  if (epsilon == 0.0) return 0.0;
  const double tau = std::isinf(t) ? std::numeric_limits<double>::infinity() : gamma() * t;
  return energy * profile.integral(tau);
}

}  // namespace fkdv
