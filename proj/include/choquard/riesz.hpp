#pragma once

#include <complex>
#include <vector>

#include "choquard/field.hpp"

namespace choquard {

/// Epstein zeta function of the integer lattice Z^dim,
///   Z(s) = sum_{m != 0} |m|^{-s},
/// analytically continued to 0 < s < dim via the theta-function splitting.
double epstein_zeta(int dim, double s);

/// Free-space convolution with the Riesz kernel |x|^{gamma - dim} (no
/// multiplicative constant), evaluated by zero-padded FFT so periodic images
/// never interact.
///
/// Off-origin cells carry the sampled kernel. The origin cell carries the
/// weight -Z(dim - gamma) h^{gamma - dim}, the lattice-sum correction that
/// makes the punctured trapezoidal sum plus origin term exact up to
/// O(h^{gamma + 2}) for smooth densities.
class RieszKernel {
 public:
  RieszKernel(const GridSpec& grid, double gamma);

  const GridSpec& grid() const noexcept { return grid_; }
  double order() const noexcept { return gamma_; }
  double origin_value() const noexcept { return origin_value_; }

  /// (I_gamma * f) sampled on the grid of f.
  Field apply(const Field& f) const;
  /// Quadrature of (I_gamma * f) g.
  double pair(const Field& f, const Field& g) const;

 private:
  GridSpec grid_;
  double gamma_;
  double origin_value_;
  std::vector<std::complex<double>> spectrum_;  // padded (2n)^dim kernel transform
};

/// One-shot convenience; prefer a cached RieszKernel in loops.
Field riesz_convolve(const Field& u, double gamma);

}  // namespace choquard
