#include "choquard/grid.hpp"

#include <cmath>
#include <string>

#include "choquard/errors.hpp"

namespace choquard {

GridSpec::GridSpec(int dim, int n, double box_length)
    : dim_(dim), n_(n), box_length_(box_length) {
  if (dim < 1 || dim > 3) {
    throw ParameterError("grid: dim must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (n < 8 || (n & (n - 1)) != 0) {
    throw ParameterError("grid: n must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ParameterError("grid: box length must be positive, got " + std::to_string(box_length));
  }
}

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

std::size_t GridSpec::cell_count() const noexcept {
  std::size_t count = 1;
  for (int a = 0; a < dim_; ++a) count *= static_cast<std::size_t>(n_);
  return count;
}

std::array<int, 3> GridSpec::unflatten(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& idx) const noexcept {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * n_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

GridSpec make_grid(int dim, int n, double box_length) { return GridSpec(dim, n, box_length); }

}  // namespace choquard
