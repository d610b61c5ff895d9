#pragma once

#include <string>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/model.hpp"

namespace choquard {

struct NehariProjection {
  double t = 1.0;
  Field projected;
  double residual = 0.0;  // <E'(t u), t u>
};

/// S - A - lambda B for u != 0 (equals first_variation_pair(u, u)).
double nehari_residual(const Field& u, const Model& model);

/// Unique t > 0 with S = t^{2p-2} A + lambda t^{2q-2} B.
/// Throws DegenerateInput for u = 0, UnsupportedRegime for lambda < 0 and
/// NoRootError when A = B = 0.
NehariProjection project_nehari(const Field& u, const Model& model);

/// Iteration record shared by the groundstate and sign-changing solvers.
struct SolveReport {
  explicit SolveReport(const GridSpec& grid) : field(grid) {}

  bool converged = false;
  int iterations = 0;
  std::vector<double> energy_history;
  std::vector<double> grad_norm_history;
  std::vector<double> residual_history;  // |Nehari residual| / S, or max nodal residual / S
  std::vector<double> step_history;
  double nehari_residual = 0.0;
  double final_energy = 0.0;
  double grad_norm = 0.0;
  double min_norm = 0.0;  // smallest ||u||_X seen on the constraint set
  Field field;

  // Sign-changing solves only.
  std::vector<double> tau_history;
  std::vector<double> theta_history;
  std::vector<double> plus_norm_history;
  std::vector<double> minus_norm_history;
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  double min_part_norm = 0.0;
};

/// Iteration cap reached; carries the partial report.
class SolveNonConvergence : public NonConvergence {
 public:
  SolveNonConvergence(const std::string& what, SolveReport report)
      : NonConvergence(what, report.grad_norm), report_(std::move(report)) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

/// Line-search constants of the projected descent.
struct DescentSettings {
  double armijo = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  double min_step = 1e-10;
  double linear_tol = 1e-12;
};

/// Centred Gaussian of width L/8 with unit L2 norm.
Field default_groundstate_init(const GridSpec& grid);

/// Projected Sobolev-gradient descent on E_lambda over the Nehari manifold.
/// Stops when ||g||_X <= tol and |residual| <= tol ||u||_X^2.
SolveReport groundstate_solve(const Model& model, const Field& init, double tol, int max_iter,
                              const DescentSettings& settings = {});

struct LevelsReport {
  SolveReport lambda_solve;
  SolveReport limit_solve;
  double m_lambda = 0.0;
  double m_J = 0.0;
  double t_of_Q = 0.0;
  bool strict = false;
};

/// Minimises J on its Nehari manifold (Q), projects Q onto N_lambda and
/// minimises E_lambda; strict iff m_lambda < m_J - tol.
LevelsReport compare_levels(const Model& model, double tol, int max_iter);

struct LDerivative {
  double direct = 0.0;       // 2S - 2pA - 2q lambda B
  double on_manifold = 0.0;  // 2(1-q)S - 2(p-q)A
};

/// <L'(u), u> for u on the Nehari manifold; PreconditionError when
/// |residual| > 1e-6 S.
LDerivative L_derivative_pair(const Field& u, const Model& model);

}  // namespace choquard
