#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "choquard/grid.hpp"

namespace choquard {

/// Real function sampled on the nodes of a GridSpec, row-major.
class Field {
 public:
  explicit Field(GridSpec grid);
  /// Throws ParameterError on size mismatch or non-finite values.
  Field(GridSpec grid, std::vector<double> values);

  /// Samples f(x) at every node; x holds dim coordinates.
  template <class F>
  static Field from_function(const GridSpec& grid, F&& f) {
    Field out(grid);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto idx = grid.unflatten(i);
      for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(idx[a]);
      out.values_[i] = f(std::span<const double>(x.data(), grid.dim()));
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double c) noexcept;

  /// this += c * other
  Field& axpy(double c, const Field& other);

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double c, Field a);
Field operator*(Field a, double c);

/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

/// Throws ParameterError when the grids differ.
void require_same_grid(const Field& a, const Field& b, const char* where);

/// Quadrature h^dim * sum of values.
double integrate(const Field& u);

/// Quadrature of u * v.
double quad_dot(const Field& u, const Field& v);

/// Plain L2 norm of the quadrature, sqrt(quad_dot(u, u)).
double l2_norm(const Field& u);

double min_value(const Field& u);
double max_value(const Field& u);

/// Reflection x -> -x on the periodic lattice (index j -> (n - j) mod n on every axis).
Field reflect(const Field& u);

}  // namespace choquard
