#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "choquard/field.hpp"

namespace choquard::oracles {

// Cross integral on a periodic 1-D lattice: the kernel is read off the
// symbol by a direct O(n^2) inverse DFT, K(m) = -c(m) / h for m != 0.
inline double brute_cross(const Field& u, double s) {
  const GridSpec& g = u.grid();
  const int n = g.n();
  const double h = g.spacing();
  const double L = g.box_length();
  std::vector<double> c(n, 0.0);
  for (int m = 0; m < n; ++m) {
    for (int k = -n / 2 + 1; k <= n / 2; ++k) {
      const double sym = std::pow(std::abs(2.0 * std::numbers::pi * k / L), 2.0 * s);
      c[m] += sym * std::cos(2.0 * std::numbers::pi * k * m / n) / n;
    }
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double K = -c[(i - j + n) % n] / h;
      const double up_i = std::max(u[i], 0.0), um_i = std::min(u[i], 0.0);
      const double up_j = std::max(u[j], 0.0), um_j = std::min(u[j], 0.0);
      acc += K * (up_i * um_j + um_i * up_j);
    }
  }
  return 0.5 * h * h * acc;
}

// (1 - |x|^2)^3 on the unit ball, zero outside.
inline Field compact_bump(const GridSpec& g, double amplitude) {
  return Field::from_function(g, [&](auto x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return r2 < 1.0 ? amplitude * std::pow(1.0 - r2, 3) : 0.0;
  });
}

}  // namespace choquard::oracles
