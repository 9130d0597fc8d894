#include "fkdv/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fkdv {

double GridSpec::wavenumber(std::size_t j) const {
  return std::numbers::pi * static_cast<double>(j) / half_length;
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> xs(num_points);
  for (std::size_t i = 0; i < num_points; ++i) xs[i] = x(i);
  return xs;
}

GridSpec make_grid(double half_length, std::size_t num_points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid: half-length must be positive, got " + std::to_string(half_length));
  if (num_points < 64)
    throw std::invalid_argument("grid: need at least 64 points, got " + std::to_string(num_points));
  if (num_points % 2 != 0)
    throw std::invalid_argument("grid: point count must be even, got " + std::to_string(num_points));
  GridSpec g;
  g.half_length = half_length;
  g.num_points = num_points;
  g.spacing = 2.0 * half_length / static_cast<double>(num_points);
  return g;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b))
    throw std::invalid_argument(std::string(where) + ": grid mismatch (N=" + std::to_string(a.num_points) +
                                ", L=" + std::to_string(a.half_length) + " vs N=" +
                                std::to_string(b.num_points) + ", L=" + std::to_string(b.half_length) + ")");
}

Field::Field(const GridSpec& grid) : grid_(grid), values_(grid.num_points, 0.0) {}

Field::Field(const GridSpec& grid, std::vector<double> samples) : grid_(grid), values_(std::move(samples)) {
  if (values_.size() != grid_.num_points)
    throw std::invalid_argument("field: sample count " + std::to_string(values_.size()) +
                                " does not match grid size " + std::to_string(grid_.num_points));
}

Field Field::sample(const GridSpec& grid, const std::function<double(double)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid.num_points; ++i) out.values_[i] = f(grid.x(i));
  return out;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise product");
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace fkdv
