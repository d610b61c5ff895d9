#include "choquard/nehari.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "choquard/random_fields.hpp"

namespace choquard {

namespace {

struct Components {
  double S;
  double A;
  double B;
};

Components components(const Field& u, const Model& model) {
  const double lambda = model.params().lambda;
  return {model.norm2(u), model.alpha_nonlocal(u), lambda == 0.0 ? 0.0 : model.beta_nonlocal(u)};
}

bool is_zero(const Field& u) {
  for (double v : u.values())
    if (v != 0.0) return false;
  return true;
}

// Root of t^{2p-2} A + lambda t^{2q-2} B - S, increasing in t.
double nehari_scale(const Components& c, double p, double q, double lambda) {
  const auto f = [&](double t) {
    return std::pow(t, 2 * p - 2) * c.A + lambda * std::pow(t, 2 * q - 2) * c.B - c.S;
  };
  const auto df = [&](double t) {
    return (2 * p - 2) * std::pow(t, 2 * p - 3) * c.A + lambda * (2 * q - 2) * std::pow(t, 2 * q - 3) * c.B;
  };
  double lo = 1.0, hi = 1.0;
  if (f(1.0) < 0.0) {
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw NoRootError("project_nehari: no bracket found");
    }
  } else {
    while (f(lo) > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) throw NoRootError("project_nehari: no bracket found");
    }
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 20; ++i) {
    const double d = df(t);
    if (!(d > 0.0)) break;
    const double next = t - f(t) / d;
    if (!(next > 0.0)) break;
    const double step = std::abs(next - t);
    t = next;
    if (step <= 1e-14 * t) break;
  }
  return t;
}

}  // namespace

double nehari_residual(const Field& u, const Model& model) {
  if (is_zero(u)) throw DegenerateInput("nehari_residual: u = 0");
  const Components c = components(u, model);
  return c.S - c.A - model.params().lambda * c.B;
}

NehariProjection project_nehari(const Field& u, const Model& model) {
  const auto& prm = model.params();
  if (is_zero(u)) throw DegenerateInput("project_nehari: u = 0");
  if (prm.lambda < 0.0) {
    throw UnsupportedRegime("project_nehari: lambda = " + format_real(prm.lambda) +
                            " < 0, the Nehari scale is unique only for lambda >= 0");
  }
  const Components c = components(u, model);
  if (c.A == 0.0 && (prm.lambda == 0.0 || c.B == 0.0)) {
    throw NoRootError("project_nehari: both nonlocal terms vanish");
  }
  const double t = nehari_scale(c, prm.p, prm.q, prm.lambda);
  Field projected = t * u;
  const double residual = nehari_residual(projected, model);
  return {t, std::move(projected), residual};
}

Field default_groundstate_init(const GridSpec& grid) {
  Field u = gaussian_bump(grid, grid.box_length() / 8.0);
  u *= 1.0 / l2_norm(u);
  return u;
}

SolveReport groundstate_solve(const Model& model, const Field& init, double tol, int max_iter,
                              const DescentSettings& settings) {
  if (is_zero(init)) throw DegenerateInput("groundstate_solve: initial field is zero");
  SolveReport report(model.grid());
  Field u = project_nehari(init, model).projected;
  double E = energy(u, model).total;
  report.min_norm = std::sqrt(model.norm2(u));

  for (int iter = 0;; ++iter) {
    const Field g = gradient_field(u, model, settings.linear_tol);
    const double gnorm = std::sqrt(model.norm2(g));
    const double S = model.norm2(u);
    const double res = nehari_residual(u, model);
    report.min_norm = std::min(report.min_norm, std::sqrt(S));
    report.energy_history.push_back(E);
    report.grad_norm_history.push_back(gnorm);
    report.residual_history.push_back(std::abs(res) / S);
    report.iterations = iter;
    report.nehari_residual = res;
    report.final_energy = E;
    report.grad_norm = gnorm;
    report.field = u;

    if (gnorm <= tol && std::abs(res) <= tol * S) {
      report.converged = true;
      return report;
    }
    if (iter >= max_iter) {
      throw SolveNonConvergence("groundstate_solve: no convergence after " + std::to_string(max_iter) +
                                    " iterations (grad norm " + format_real(gnorm) + ")",
                                std::move(report));
    }

    // Energy differences below this are not resolvable in double precision.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(E) + S);
    double eta = settings.initial_step;
    for (;;) {
      const Field trial = project_nehari(u - eta * g, model).projected;
      const double Et = energy(trial, model).total;
      if (Et <= E - settings.armijo * eta * gnorm * gnorm + slack || eta < settings.min_step) {
        if (Et <= E + slack) {
          u = trial;
          E = Et;
        }
        break;
      }
      eta *= settings.shrink;
    }
    report.step_history.push_back(eta);
  }
}

LevelsReport compare_levels(const Model& model, double tol, int max_iter) {
  if (!(model.params().lambda > 0.0)) throw ParameterError("compare_levels: requires lambda > 0");
  const Field init = default_groundstate_init(model.grid());
  LevelsReport out{groundstate_solve(model, init, tol, max_iter),
                   groundstate_solve(model.with_lambda(0.0), init, tol, max_iter)};
  out.m_J = out.limit_solve.final_energy;
  out.t_of_Q = project_nehari(out.limit_solve.field, model).t;
  out.m_lambda = out.lambda_solve.final_energy;
  out.strict = out.m_lambda < out.m_J - tol;
  return out;
}

LDerivative L_derivative_pair(const Field& u, const Model& model) {
  if (is_zero(u)) throw DegenerateInput("L_derivative_pair: u = 0");
  const auto& prm = model.params();
  const Components c = components(u, model);
  const double res = c.S - c.A - prm.lambda * c.B;
  if (std::abs(res) > 1e-6 * c.S) {
    throw PreconditionError("L_derivative_pair: u is off the Nehari manifold (residual " +
                            format_real(res) + ", S = " + format_real(c.S) + ")");
  }
  LDerivative out;
  out.direct = 2 * c.S - 2 * prm.p * c.A - 2 * prm.q * prm.lambda * c.B;
  out.on_manifold = 2 * (1 - prm.q) * c.S - 2 * (prm.p - prm.q) * c.A;
  return out;
}

}  // namespace choquard
