#include "choquard/random_fields.hpp"

#include <cmath>

namespace choquard {

namespace {

// Uniform on [lo, hi) from the raw 64-bit stream; std::uniform_real_distribution
// is not pinned down by the standard, this is.
double uniform(std::mt19937_64& eng, double lo, double hi) {
  const double unit = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

}  // namespace

Field RandomFieldGenerator::draw(const GridSpec& grid, double amp_lo) {
  const double L = grid.box_length();
  Field out(grid);
  for (int bump = 0; bump < 3; ++bump) {
    std::array<double, 3> centre{0.0, 0.0, 0.0};
    // Always consume three coordinates so draws do not depend on dim.
    for (double& c : centre) c = uniform(engine_, -0.25 * L, 0.25 * L);
    const double sigma = uniform(engine_, L / 16.0, L / 8.0);
    const double amp = uniform(engine_, amp_lo, 1.0);
    out += gaussian_bump(grid, sigma, amp, centre);
  }
  return out;
}

Field RandomFieldGenerator::next(const GridSpec& grid) { return draw(grid, -1.0); }

Field RandomFieldGenerator::next_positive(const GridSpec& grid) { return draw(grid, 0.0); }

Field gaussian_bump(const GridSpec& grid, double sigma, double amplitude, std::array<double, 3> centre) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return Field::from_function(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
    return amplitude * std::exp(-r2 * inv);
  });
}

}  // namespace choquard
