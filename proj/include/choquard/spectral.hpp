#pragma once

#include <vector>

#include "choquard/field.hpp"

namespace choquard {

/// Fourier symbol of (-Delta)^s on the discrete lattice xi_k = 2 pi k / L,
/// stored over the half-spectrum used by real transforms.
class FractionalSymbol {
 public:
  FractionalSymbol(const GridSpec& grid, double s);

  const GridSpec& grid() const noexcept { return grid_; }
  double order() const noexcept { return s_; }
  /// |xi_k|^{2s}; exactly 0 at k = 0.
  const std::vector<double>& values() const noexcept { return values_; }

  Field apply(const Field& u) const;
  /// Applies 1 / (symbol + shift); shift must be positive.
  Field apply_shifted_inverse(const Field& f, double shift) const;
  /// Discrete quadratic form h^d/n^d sum_k symbol_k Re(u_k conj v_k).
  double form(const Field& u, const Field& v) const;

 private:
  GridSpec grid_;
  double s_;
  std::vector<double> values_;
};

/// Field with spectral coefficients |xi_k|^{2s} u_k. Requires 0 < s < 1.
Field fractional_laplacian(const Field& u, double s);

/// Discrete Gagliardo pairing; gagliardo_form(u, u, s) is [u]_{s,2}^2.
double gagliardo_form(const Field& u, const Field& v, double s);

/// gagliardo_form + quadrature of V u v. Throws PotentialViolation unless min V > 0.
double xvs_inner(const Field& u, const Field& v, double s, const Field& V);

/// (quadrature of |u|^r)^(1/r), r >= 1.
double lp_norm(const Field& u, double r);

/// max over grid points y of the quadrature of |u|^r over the periodic ball B_radius(y).
double concentration_function(const Field& u, double r, double radius);

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves ((-Delta)^s + V) w = f by conjugate gradients preconditioned with the
/// constant-coefficient operator ((-Delta)^s + mean V). Throws NonConvergence
/// after max_iter iterations.
Field solve_linear_operator(const Field& f, double s, const Field& V, double tol,
                            int max_iter = 500, LinearSolveStats* stats = nullptr);

/// Forward operator ((-Delta)^s + V) w.
Field apply_linear_operator(const Field& w, double s, const Field& V);

}  // namespace choquard
