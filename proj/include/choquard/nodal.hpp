#pragma once

#include <cstdint>
#include <vector>

#include "choquard/nehari.hpp"

namespace choquard {

/// u = plus + minus with plus = max(u, 0) and minus = min(u, 0).
struct NodalSplit {
  Field plus;
  Field minus;
};

NodalSplit split_parts(const Field& u);

/// -gagliardo_form(plus, minus, s): the double integral of
/// (u+(x)u-(y) + u-(x)u+(y)) against the fractional kernel. Always <= 0.
double cross_gagliardo(const NodalSplit& split, double s);

/// Coefficients of E(tau u+ + theta u-) for a fixed sign-changing u.
/// Phi(T, Theta) = E(T^{1/2p} u+ + Theta^{1/2p} u-) is the monomial sum
///   a1/2 T^{1/p} + b1/2 Theta^{1/p} - A_cross (T Theta)^{1/2p}
///   - a2/2p T - a3/2p Theta - a4/p (T Theta)^{1/2}
///   - lambda (b2/2q T^{q/p} + b3/2q Theta^{q/p} + b4/q (T Theta)^{q/2p}).
struct PhiCoefficients {
  double a1 = 0.0, b1 = 0.0;  // ||u+||_X^2, ||u-||_X^2
  double a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double b2 = 0.0, b3 = 0.0, b4 = 0.0;
  double A_cross = 0.0;
  double p = 0.0, q = 0.0, lambda = 0.0;

  double phi(double T, double Theta) const;
  std::array<double, 2> gradient(double T, double Theta) const;
  /// {Phi_TT, Phi_TTheta, Phi_ThetaTheta}
  std::array<double, 3> hessian(double T, double Theta) const;

  /// E(tau u+ + theta u-).
  double energy_at(double tau, double theta) const;
  /// <E'(v), v+> and <E'(v), v-> for v = tau u+ + theta u-.
  std::array<double, 2> residuals_at(double tau, double theta) const;
  /// Magnitude of the terms entering residuals_at(tau, theta).
  double residual_scale(double tau, double theta) const;
};

/// Throws DegenerateInput when u is one-signed.
PhiCoefficients phi_coefficients(const Field& u, const Model& model);

/// Phi(T, Theta) by direct energy evaluation of T^{1/2p} u+ + Theta^{1/2p} u-.
double phi(const Field& u, double T, double Theta, const Model& model);

struct NodalProjection {
  Field projected;
  double tau0 = 1.0;
  double theta0 = 1.0;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  /// Maximiser of Phi in the substituted variables (T, Theta) = (tau0^{2p}, theta0^{2p}).
  double T = 1.0;
  double Theta = 1.0;
  /// Largest relative deviation of (tau0, theta0) across the multi-starts.
  double start_spread = 0.0;
};

/// Maximises Phi over (0, inf)^2 by safeguarded Newton from four starts and
/// rescales the parts. Throws DegenerateInput for one-signed u and
/// NonConvergence if no start converges.
NodalProjection project_nodal(const Field& u, const Model& model);

struct NodalResiduals {
  double plus = 0.0;   // <E'(u), u+>
  double minus = 0.0;  // <E'(u), u->
  double expansion_plus = 0.0;
  double expansion_minus = 0.0;
};

/// Direct pairings plus the coefficient expansion; throws Error if the two
/// disagree by more than 1e-8 relative to the size of the expansion terms.
NodalResiduals nodal_residuals(const Field& u, const Model& model);

/// Opposite-sign Gaussians (width L/16) at +-L/6 e1, exactly odd under x -> -x.
Field dipole_init(const GridSpec& grid);

/// Projected descent on E_lambda over the nodal set. Stops when ||g||_X <= tol
/// and both nodal residuals are <= tol ||u||_X^2. Throws NodalCollapse when a
/// part's norm drops below 1e-12.
SolveReport signchanging_solve(const Model& model, const Field& init, double tol, int max_iter,
                               const DescentSettings& settings = {});

struct ConcavityReport {
  std::vector<double> max_eigenvalues;  // one per sample
  double max_eigenvalue = 0.0;
  double maximizer_max_eigenvalue = 0.0;
  double diagonal_max_second_difference = 0.0;
  bool success = false;  // every sampled max eigenvalue < 1e-8
};

/// Central-difference Hessians of the directly evaluated Phi at random
/// points of (0, 4T*) x (0, 4Theta*), where (T*, Theta*) maximises Phi.
ConcavityReport phi_concavity_check(const Field& u, const Model& model, int samples, std::uint64_t seed);

}  // namespace choquard
