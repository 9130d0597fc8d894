#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fkdv {

// Uniform periodic grid on [-L, L) with N nodes, x_i = -L + i*h.
struct GridSpec {
  double half_length = 0.0;
  std::size_t num_points = 0;
  double spacing = 0.0;

  double x(std::size_t i) const { return -half_length + static_cast<double>(i) * spacing; }
  double period() const { return 2.0 * half_length; }
  // Angular wavenumber of Fourier index j.
  double wavenumber(std::size_t j) const;
  std::size_t num_modes() const { return num_points / 2 + 1; }
  std::vector<double> nodes() const;

  bool operator==(const GridSpec&) const = default;
};

// Throws std::invalid_argument unless N is even, N >= 64 and L > 0.
GridSpec make_grid(double half_length, std::size_t num_points);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid);
  Field(const GridSpec& grid, std::vector<double> samples);

  static Field sample(const GridSpec& grid, const std::function<double(double)>& f);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  bool all_finite() const;
  double max_abs() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
// Pointwise product.
Field hadamard(const Field& a, const Field& b);

}  // namespace fkdv
