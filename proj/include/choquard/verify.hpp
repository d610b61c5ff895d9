#pragma once

#include <cstdint>
#include <vector>

#include "choquard/model.hpp"

namespace choquard {

/// Splitting defect as a function of translation distance.
struct DecayCurve {
  std::vector<double> distances;
  std::vector<double> errors;
  double magnitude = 0.0;       // size of the split quantity used to normalise
  double terminal_ratio = 0.0;  // errors.back() / magnitude (0 when both vanish)
};

/// u(x - z e1) on the periodic grid: an exact roll when z is a whole number of
/// cells, a Fourier phase shift otherwise.
Field translate(const Field& u, double z);

/// int | |u + w_z|^q - |w_z|^q - |u|^q |^{r/q}, normalised by ||u||_r^r + ||w||_r^r.
DecayCurve brezis_lieb_local(const Field& w, const Field& u, const std::vector<double>& translations,
                             double q_exp, double r_exp);

/// |D(u + w_z) - D(w_z) - D(u)| with D(v) = int (I_gamma * |v|^r)|v|^r,
/// normalised by D(u) + D(w).
DecayCurve brezis_lieb_nonlocal(const Field& u, const Field& w, const std::vector<double>& translations,
                                double gamma, double r_exp);

/// |P(u + w_z) - P(u)| with P(v) = int (I_gamma * |v|^r)|v|^{r-2} v h,
/// normalised by |P(u)|.
DecayCurve brezis_lieb_pairing(const Field& u, const Field& w, const Field& h,
                               const std::vector<double>& translations, double gamma, double r_exp);

/// |E_lambda(u + w_z) - E_lambda(u) - J(w_z)|, normalised by |E_lambda(u)| + |J(w)|.
/// Requires a constant potential (UnsupportedRegime otherwise).
DecayCurve energy_splitting(const Field& u, const Field& w, const std::vector<double>& translations,
                            const Model& model);

struct HlsSweep {
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

/// |int (I_gamma * f) g| / (||f||_r ||g||_t) over `count` generator pairs.
HlsSweep hls_sweep(const GridSpec& grid, double gamma, double r, double t, int count, std::uint64_t seed);

struct FdSuite {
  double max_rel_error = 0.0;
  std::vector<double> rel_errors;
};

/// Worst |pair(u, v) - central FD| / (1 + |pair|) over `count` random pairs:
/// u = 0.2 + non-negative generator draw (so the energy is smooth along the
/// line), v = 10 x generator draw. Requires eps in [1e-7, 1e-3].
FdSuite gradient_fd_suite(const Model& model, int count, std::uint64_t seed, double eps);

struct FdSlope {
  std::vector<double> eps;
  std::vector<double> max_rel_errors;
  double slope = 0.0;  // least-squares slope of log(error) against log(eps)
};

FdSlope gradient_fd_slope(const Model& model, int count, std::uint64_t seed, const std::vector<double>& eps);

}  // namespace choquard
