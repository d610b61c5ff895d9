#include "choquard/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "choquard/random_fields.hpp"

namespace choquard {

namespace {

struct Monomial {
  double c;
  double a;  // exponent of T
  double b;  // exponent of Theta
};

std::array<Monomial, 9> monomials(const PhiCoefficients& k) {
  const double e1 = 1.0 / k.p;
  const double e2 = k.q / k.p;
  return {{{0.5 * k.a1, e1, 0.0},
           {0.5 * k.b1, 0.0, e1},
           {-k.A_cross, 0.5 * e1, 0.5 * e1},
           {-k.a2 / (2 * k.p), 1.0, 0.0},
           {-k.a3 / (2 * k.p), 0.0, 1.0},
           {-k.a4 / k.p, 0.5, 0.5},
           {-k.lambda * k.b2 / (2 * k.q), e2, 0.0},
           {-k.lambda * k.b3 / (2 * k.q), 0.0, e2},
           {-k.lambda * k.b4 / k.q, 0.5 * e2, 0.5 * e2}}};
}

bool is_zero(const Field& u) {
  return std::all_of(u.values().begin(), u.values().end(), [](double v) { return v == 0.0; });
}

double max_eigenvalue(double a, double b, double c) {
  const double m = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  return m + r;
}

double uniform_open(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

double norm_of(const Field& u, const Model& model) { return std::sqrt(model.norm2(u)); }

struct NewtonResult {
  double T;
  double Theta;
  bool converged;
  double residual;  // max |r+-| / scale at the final iterate
};

NewtonResult maximize_phi(const PhiCoefficients& k, double T, double Theta) {
  const auto rel_residual = [&](double t, double th) {
    const double tau = std::pow(t, 0.5 / k.p);
    const double theta = std::pow(th, 0.5 / k.p);
    const auto r = k.residuals_at(tau, theta);
    return std::max(std::abs(r[0]), std::abs(r[1])) / k.residual_scale(tau, theta);
  };
  double res = rel_residual(T, Theta);
  for (int iter = 0; iter < 200; ++iter) {
    if (res <= 1e-13) return {T, Theta, true, res};
    const auto g = k.gradient(T, Theta);
    const auto h = k.hessian(T, Theta);
    // Shift the Hessian until it is negative definite (Levenberg).
    double mu = 0.0;
    const double top = max_eigenvalue(h[0], h[1], h[2]);
    if (!(top < 0.0)) mu = top + std::abs(h[0]) + std::abs(h[1]) + std::abs(h[2]);
    const double a = h[0] - mu, b = h[1], c = h[2] - mu;
    const double det = a * c - b * b;
    const double dT = -(c * g[0] - b * g[1]) / det;
    const double dTh = -(a * g[1] - b * g[0]) / det;

    const double phi0 = k.phi(T, Theta);
    const double slack = 16 * std::numeric_limits<double>::epsilon() * (std::abs(phi0) + 0.5 * (k.a1 + k.b1));
    double step = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 80; ++halving, step *= 0.5) {
      const double nT = T + step * dT;
      const double nTh = Theta + step * dTh;
      if (!(nT > 0.0 && nTh > 0.0)) continue;
      if (k.phi(nT, nTh) >= phi0 - slack) {
        moved = nT != T || nTh != Theta;
        T = nT;
        Theta = nTh;
        break;
      }
    }
    res = rel_residual(T, Theta);
    if (!moved) break;
  }
  return {T, Theta, res <= 1e-13, res};
}

}  // namespace

NodalSplit split_parts(const Field& u) {
  NodalSplit out{Field(u.grid()), Field(u.grid())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.plus[i] = std::max(u[i], 0.0);
    out.minus[i] = std::min(u[i], 0.0);
  }
  return out;
}

double cross_gagliardo(const NodalSplit& split, double s) {
  return -gagliardo_form(split.plus, split.minus, s);
}

double PhiCoefficients::phi(double T, double Theta) const {
  double acc = 0.0;
  for (const auto& m : monomials(*this)) acc += m.c * std::pow(T, m.a) * std::pow(Theta, m.b);
  return acc;
}

std::array<double, 2> PhiCoefficients::gradient(double T, double Theta) const {
  std::array<double, 2> g{0.0, 0.0};
  for (const auto& m : monomials(*this)) {
    const double v = m.c * std::pow(T, m.a) * std::pow(Theta, m.b);
    g[0] += m.a * v / T;
    g[1] += m.b * v / Theta;
  }
  return g;
}

std::array<double, 3> PhiCoefficients::hessian(double T, double Theta) const {
  std::array<double, 3> h{0.0, 0.0, 0.0};
  for (const auto& m : monomials(*this)) {
    const double v = m.c * std::pow(T, m.a) * std::pow(Theta, m.b);
    h[0] += m.a * (m.a - 1.0) * v / (T * T);
    h[1] += m.a * m.b * v / (T * Theta);
    h[2] += m.b * (m.b - 1.0) * v / (Theta * Theta);
  }
  return h;
}

double PhiCoefficients::energy_at(double tau, double theta) const {
  return phi(std::pow(tau, 2 * p), std::pow(theta, 2 * p));
}

std::array<double, 2> PhiCoefficients::residuals_at(double tau, double theta) const {
  const double tp = std::pow(tau, p), hp = std::pow(theta, p);
  const double tq = std::pow(tau, q), hq = std::pow(theta, q);
  const double cross = tau * theta * A_cross + tp * hp * a4 + lambda * tq * hq * b4;
  return {tau * tau * a1 - tp * tp * a2 - lambda * tq * tq * b2 - cross,
          theta * theta * b1 - hp * hp * a3 - lambda * hq * hq * b3 - cross};
}

double PhiCoefficients::residual_scale(double tau, double theta) const {
  const double tp = std::pow(tau, p), hp = std::pow(theta, p);
  const double tq = std::pow(tau, q), hq = std::pow(theta, q);
  const double cross = std::abs(tau * theta * A_cross) + tp * hp * a4 + std::abs(lambda) * tq * hq * b4;
  return std::max(tau * tau * a1 + tp * tp * a2 + std::abs(lambda) * tq * tq * b2,
                  theta * theta * b1 + hp * hp * a3 + std::abs(lambda) * hq * hq * b3) +
         cross;
}

PhiCoefficients phi_coefficients(const Field& u, const Model& model) {
  const auto& prm = model.params();
  const NodalSplit split = split_parts(u);
  if (is_zero(split.plus) || is_zero(split.minus)) {
    throw DegenerateInput("nodal: field is one-signed, both u+ and u- must be nonzero");
  }
  PhiCoefficients k;
  k.p = prm.p;
  k.q = prm.q;
  k.lambda = prm.lambda;
  k.a1 = model.norm2(split.plus);
  k.b1 = model.norm2(split.minus);
  k.A_cross = -model.symbol().form(split.plus, split.minus);

  const Field dp = abs_pow(split.plus, prm.p);
  const Field dm = abs_pow(split.minus, prm.p);
  const Field ip = model.alpha_kernel().apply(dp);
  k.a2 = quad_dot(ip, dp);
  k.a4 = quad_dot(ip, dm);
  k.a3 = model.alpha_kernel().pair(dm, dm);
  if (prm.lambda != 0.0) {
    const Field ep = abs_pow(split.plus, prm.q);
    const Field em = abs_pow(split.minus, prm.q);
    const Field jp = model.beta_kernel().apply(ep);
    k.b2 = quad_dot(jp, ep);
    k.b4 = quad_dot(jp, em);
    k.b3 = model.beta_kernel().pair(em, em);
  }
  return k;
}

double phi(const Field& u, double T, double Theta, const Model& model) {
  const NodalSplit split = split_parts(u);
  if (is_zero(split.plus) || is_zero(split.minus)) {
    throw DegenerateInput("phi: field is one-signed, both u+ and u- must be nonzero");
  }
  const double e = 0.5 / model.params().p;
  Field v = std::pow(T, e) * split.plus;
  v.axpy(std::pow(Theta, e), split.minus);
  return energy(v, model).total;
}

NodalResiduals nodal_residuals(const Field& u, const Model& model) {
  const PhiCoefficients k = phi_coefficients(u, model);
  const NodalSplit split = split_parts(u);
  NodalResiduals out;
  out.plus = first_variation_pair(u, split.plus, model);
  out.minus = first_variation_pair(u, split.minus, model);
  const auto r = k.residuals_at(1.0, 1.0);
  out.expansion_plus = r[0];
  out.expansion_minus = r[1];
  const double scale = k.residual_scale(1.0, 1.0);
  const double gap = std::max(std::abs(out.plus - r[0]), std::abs(out.minus - r[1]));
  if (gap > 1e-8 * scale) {
    throw Error("nodal_residuals: coefficient expansion disagrees with the direct pairing (gap " +
                format_real(gap) + ", scale " + format_real(scale) + ")");
  }
  return out;
}

NodalProjection project_nodal(const Field& u, const Model& model) {
  const PhiCoefficients k = phi_coefficients(u, model);
  const double p = k.p;
  const double T_hat = std::pow(k.a1 / k.a2, p / (p - 1.0));
  const double Th_hat = std::pow(k.b1 / k.a3, p / (p - 1.0));
  const std::array<std::array<double, 2>, 4> starts{{{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}, {0.1, 0.1}}};

  std::vector<NewtonResult> results;
  for (const auto& s : starts) results.push_back(maximize_phi(k, s[0] * T_hat, s[1] * Th_hat));

  const NewtonResult* best = nullptr;
  for (const auto& r : results) {
    if (r.converged && (!best || k.phi(r.T, r.Theta) > k.phi(best->T, best->Theta))) best = &r;
  }
  if (!best) {
    double least = std::numeric_limits<double>::infinity();
    for (const auto& r : results) least = std::min(least, r.residual);
    throw NonConvergence("project_nodal: Newton did not converge from any start (best relative residual " +
                             format_real(least) + ")",
                         least);
  }

  const double tau0 = std::pow(best->T, 0.5 / p);
  const double theta0 = std::pow(best->Theta, 0.5 / p);
  const NodalSplit split = split_parts(u);
  Field v = tau0 * split.plus;
  v.axpy(theta0, split.minus);
  const NodalResiduals res = nodal_residuals(v, model);

  NodalProjection out{std::move(v)};
  out.tau0 = tau0;
  out.theta0 = theta0;
  out.T = best->T;
  out.Theta = best->Theta;
  out.residual_plus = res.plus;
  out.residual_minus = res.minus;
  for (const auto& r : results) {
    const double tau = std::pow(r.T, 0.5 / p), theta = std::pow(r.Theta, 0.5 / p);
    out.start_spread = std::max({out.start_spread, std::abs(tau - tau0) / tau0, std::abs(theta - theta0) / theta0});
  }
  return out;
}

Field dipole_init(const GridSpec& grid) {
  const double L = grid.box_length();
  const Field bump = gaussian_bump(grid, L / 16.0, 1.0, {L / 6.0, 0.0, 0.0});
  return bump - reflect(bump);
}

SolveReport signchanging_solve(const Model& model, const Field& init, double tol, int max_iter,
                               const DescentSettings& settings) {
  SolveReport report(model.grid());
  NodalProjection proj = project_nodal(init, model);
  Field u = proj.projected;
  double E = energy(u, model).total;
  report.min_norm = norm_of(u, model);
  report.min_part_norm = std::numeric_limits<double>::infinity();

  for (int iter = 0;; ++iter) {
    const NodalSplit split = split_parts(u);
    const double plus_norm = norm_of(split.plus, model);
    const double minus_norm = norm_of(split.minus, model);
    report.min_part_norm = std::min({report.min_part_norm, plus_norm, minus_norm});
    report.plus_norm_history.push_back(plus_norm);
    report.minus_norm_history.push_back(minus_norm);
    report.tau_history.push_back(proj.tau0);
    report.theta_history.push_back(proj.theta0);
    if (std::min(plus_norm, minus_norm) < 1e-12) {
      throw NodalCollapse("signchanging_solve: part norms " + format_real(plus_norm) + ", " +
                          format_real(minus_norm) + " at iteration " + std::to_string(iter));
    }

    const Field g = gradient_field(u, model, settings.linear_tol);
    const double gnorm = norm_of(g, model);
    const double S = model.norm2(u);
    const NodalResiduals res = nodal_residuals(u, model);
    const double worst = std::max(std::abs(res.plus), std::abs(res.minus));
    report.min_norm = std::min(report.min_norm, std::sqrt(S));
    report.energy_history.push_back(E);
    report.grad_norm_history.push_back(gnorm);
    report.residual_history.push_back(worst / S);
    report.iterations = iter;
    report.residual_plus = res.plus;
    report.residual_minus = res.minus;
    report.nehari_residual = res.plus + res.minus;
    report.final_energy = E;
    report.grad_norm = gnorm;
    report.field = u;

    if (gnorm <= tol && worst <= tol * S) {
      report.converged = true;
      return report;
    }
    if (iter >= max_iter) {
      throw SolveNonConvergence("signchanging_solve: no convergence after " + std::to_string(max_iter) +
                                    " iterations (grad norm " + format_real(gnorm) + ")",
                                std::move(report));
    }

    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(E) + S);
    double eta = settings.initial_step;
    for (;;) {
      bool accepted = false;
      try {
        NodalProjection trial = project_nodal(u - eta * g, model);
        const double Et = energy(trial.projected, model).total;
        if (Et <= E - settings.armijo * eta * gnorm * gnorm + slack ||
            (eta < settings.min_step && Et <= E + slack)) {
          u = trial.projected;
          E = Et;
          proj = std::move(trial);
          accepted = true;
        }
      } catch (const DegenerateInput&) {
        // The trial lost one of its parts; shorten the step.
      }
      if (accepted || eta < settings.min_step) break;
      eta *= settings.shrink;
    }
    report.step_history.push_back(eta);
  }
}

ConcavityReport phi_concavity_check(const Field& u, const Model& model, int samples, std::uint64_t seed) {
  const NodalProjection proj = project_nodal(u, model);
  const double Ts = proj.T, Ths = proj.Theta;
  const auto hessian_max = [&](double T, double Th) {
    const double hT = 1e-3 * T, hTh = 1e-3 * Th;
    const double f0 = phi(u, T, Th, model);
    const double fTT = (phi(u, T + hT, Th, model) - 2 * f0 + phi(u, T - hT, Th, model)) / (hT * hT);
    const double fHH = (phi(u, T, Th + hTh, model) - 2 * f0 + phi(u, T, Th - hTh, model)) / (hTh * hTh);
    const double fTH = (phi(u, T + hT, Th + hTh, model) - phi(u, T + hT, Th - hTh, model) -
                        phi(u, T - hT, Th + hTh, model) + phi(u, T - hT, Th - hTh, model)) /
                       (4 * hT * hTh);
    return max_eigenvalue(fTT, fTH, fHH);
  };

  ConcavityReport out;
  std::mt19937_64 eng(seed);
  out.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double T = 4.0 * Ts * uniform_open(eng);
    const double Th = 4.0 * Ths * uniform_open(eng);
    const double e = hessian_max(T, Th);
    out.max_eigenvalues.push_back(e);
    out.max_eigenvalue = std::max(out.max_eigenvalue, e);
  }
  out.maximizer_max_eigenvalue = hessian_max(Ts, Ths);

  const double top = 4.0 * std::max(Ts, Ths);
  out.diagonal_max_second_difference = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 20; ++i) {
    const double x = top * i / 21.0;
    const double h = 1e-3 * x;
    const double d2 = (phi(u, x + h, x + h, model) - 2 * phi(u, x, x, model) + phi(u, x - h, x - h, model)) / (h * h);
    out.diagonal_max_second_difference = std::max(out.diagonal_max_second_difference, d2);
  }
  out.success = samples > 0 && out.max_eigenvalue < 1e-8;
  return out;
}

}  // namespace choquard
