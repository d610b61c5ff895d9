#include "choquard/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "choquard/errors.hpp"

namespace choquard {

Field::Field(GridSpec grid) : grid_(grid), values_(grid.cell_count(), 0.0) {}

Field::Field(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw ParameterError("field: expected " + std::to_string(grid_.cell_count()) + " values, got " +
                         std::to_string(values_.size()));
  }
  if (!all_finite()) throw ParameterError("field: values must be finite");
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other, "field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other, "field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double c) noexcept {
  for (double& v : values_) v *= c;
  return *this;
}

Field& Field::axpy(double c, const Field& other) {
  require_same_grid(*this, other, "field axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += c * other.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double c, Field a) { return a *= c; }
Field operator*(Field a, double c) { return a *= c; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a, b, "hadamard");
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid() == b.grid())) throw ParameterError(std::string(where) + ": grid mismatch");
}

double integrate(const Field& u) {
  const auto v = u.values();
  return u.grid().cell_volume() * std::accumulate(v.begin(), v.end(), 0.0);
}

double quad_dot(const Field& u, const Field& v) {
  require_same_grid(u, v, "quad_dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return u.grid().cell_volume() * acc;
}

double l2_norm(const Field& u) { return std::sqrt(quad_dot(u, u)); }

double min_value(const Field& u) {
  const auto v = u.values();
  return *std::min_element(v.begin(), v.end());
}

double max_value(const Field& u) {
  const auto v = u.values();
  return *std::max_element(v.begin(), v.end());
}

Field reflect(const Field& u) {
  const GridSpec& g = u.grid();
  Field out(g);
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto idx = g.unflatten(i);
    for (int a = 0; a < g.dim(); ++a) idx[a] = (g.n() - idx[a]) % g.n();
    out[g.flatten(idx)] = u[i];
  }
  return out;
}

}  // namespace choquard
