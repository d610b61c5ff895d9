#pragma once

#include <cstdint>
#include <random>

#include "choquard/field.hpp"

namespace choquard {

/// Deterministic generator of localized test fields: each draw is a sum of
/// three Gaussians with centres uniform in the middle half of the box, widths
/// uniform in [L/16, L/8] and amplitudes uniform in [-1, 1]. Draws depend only
/// on the seed and the box length, never on the resolution.
class RandomFieldGenerator {
 public:
  explicit RandomFieldGenerator(std::uint64_t seed) : engine_(seed) {}

  Field next(const GridSpec& grid);
  /// Same, with amplitudes in [0, 1] so the field is non-negative.
  Field next_positive(const GridSpec& grid);

 private:
  Field draw(const GridSpec& grid, double amp_lo);

  std::mt19937_64 engine_;
};

/// exp(-|x - c|^2 / (2 sigma^2)) scaled by amplitude; c has dim entries (missing = 0).
Field gaussian_bump(const GridSpec& grid, double sigma, double amplitude = 1.0,
                    std::array<double, 3> centre = {0.0, 0.0, 0.0});

}  // namespace choquard
