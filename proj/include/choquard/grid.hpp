#pragma once

#include <array>
#include <cstddef>

namespace choquard {

/// Uniform tensor grid on the box [-L/2, L/2)^dim with n points per axis.
class GridSpec {
 public:
  /// Throws ParameterError unless dim in {1,2,3}, n >= 8 is a power of two and L > 0.
  GridSpec(int dim, int n, double box_length);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double box_length() const noexcept { return box_length_; }
  double spacing() const noexcept { return box_length_ / n_; }
  double cell_volume() const noexcept;
  std::size_t cell_count() const noexcept;

  /// Coordinate of index j along any axis: -L/2 + j h.
  double coordinate(int j) const noexcept { return -0.5 * box_length_ + j * spacing(); }

  /// Splits a flat row-major index into per-axis indices (unused axes are 0).
  std::array<int, 3> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const std::array<int, 3>& idx) const noexcept;

  bool operator==(const GridSpec& other) const noexcept = default;

 private:
  int dim_;
  int n_;
  double box_length_;
};

GridSpec make_grid(int dim, int n, double box_length);

}  // namespace choquard
