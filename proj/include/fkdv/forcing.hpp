#pragma once

#include <string>
#include <vector>

namespace fkdv {

// Slow-time profile f(tau). Either f = 0, f = scale * e^{-tau}, or a
// monotone cubic (Fritsch-Carlson) interpolant of samples, zero outside the
// sampled range.
class ForcingProfile {
 public:
  enum class Kind { none, exp_decay, tabulated };

  static ForcingProfile none();
  static ForcingProfile exp_decay(double scale = 1.0);
  // Throws std::invalid_argument for fewer than two samples, unsorted or
  // non-finite abscissae.
  static ForcingProfile tabulated(std::vector<double> tau, std::vector<double> values);

  Kind kind() const { return kind_; }
  std::string name() const;
  double scale() const { return scale_; }
  const std::vector<double>& table_tau() const { return tau_; }
  const std::vector<double>& table_values() const { return values_; }

  double value(double tau) const;
  // int_0^tau f; tau may be +infinity.
  double integral(double tau) const;
  // True when |f(tau)| <= e^{-tau} at every sample / analytically.
  bool satisfies_decay_bound() const;

 private:
  Kind kind_ = Kind::none;
  double scale_ = 0.0;
  std::vector<double> tau_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::vector<double> cumulative_;
  double segment_integral(std::size_t k, double upto) const;
};

// Forcing eps f(gamma t) u with gamma = eps / E.
struct ForcingSpec {
  double epsilon = 0.0;
  double energy = 1.0;
  ForcingProfile profile = ForcingProfile::none();

  // Throws std::invalid_argument unless 0 <= epsilon <= 1 and E > 0.
  void validate() const;
  double gamma() const { return epsilon / energy; }
  double amplitude(double t) const { return epsilon * profile.value(gamma() * t); }
  // eps int_0^t f(gamma s) ds = E int_0^{gamma t} f; t may be +infinity.
  double log_growth(double t) const;
};

}  // namespace fkdv
