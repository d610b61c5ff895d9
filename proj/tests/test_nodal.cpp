#include <cmath>
#include <numbers>
#include <random>

#include "choquard/errors.hpp"
#include "choquard/nodal.hpp"
#include "choquard/random_fields.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace choquard;
using oracles::brute_cross;

namespace {

ModelParams nodal_params() {
  ModelParams p;
  p.dim = 3;
  p.s = 0.6;
  p.alpha = p.beta = 2.0;
  p.p = 2.6;
  p.q = 2.2;
  p.lambda = 0.5;
  p.potential = PotentialSpec::constant(1.0);
  p.mode = Mode::nodal;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Field random_dipole(const GridSpec& g, RandomFieldGenerator& gen) {
  return dipole_init(g) + 0.3 * gen.next(g);
}

}  // namespace

TEST_CASE("split parts") {
  const auto g = make_grid(1, 64, 10.0);
  const Field u = Field::from_function(g, [](auto x) { return std::sin(2.0 * std::numbers::pi * x[0] / 10.0); });
  const NodalSplit sp = split_parts(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(sp.plus[i] + sp.minus[i] == u[i]);
    CHECK(sp.plus[i] * sp.minus[i] == 0.0);
    CHECK(sp.plus[i] >= 0.0);
    CHECK(sp.minus[i] <= 0.0);
    CHECK(sp.plus[i] == (u[i] > 0.0 ? u[i] : 0.0));
  }
  const NodalSplit neg = split_parts(-1.0 * u);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(neg.plus[i] == -sp.minus[i]);

  const Field bump = gaussian_bump(g, 1.0);
  CHECK(max_value(split_parts(bump).minus) == 0.0);
  CHECK(min_value(split_parts(bump).minus) == 0.0);
}

TEST_CASE("cross gagliardo matches the brute-force double sum") {
  const auto g = make_grid(1, 32, 8.0);
  RandomFieldGenerator gen(5);
  for (double s : {0.25, 0.6, 0.9}) {
    for (int trial = 0; trial < 3; ++trial) {
      const Field u = dipole_init(g) + 0.5 * gen.next(g);
      const double fast = cross_gagliardo(split_parts(u), s);
      const double brute = brute_cross(u, s);
      CHECK(fast < 0.0);
      CHECK(rel(fast, brute) < 1e-8);
    }
  }
  CHECK(cross_gagliardo(split_parts(gaussian_bump(g, 1.0)), 0.5) == 0.0);
}

TEST_CASE("phi coefficients reconstruct the energy") {
  const auto g = make_grid(3, 16, 8.0);
  const Model model(nodal_params(), g);
  RandomFieldGenerator gen(6);
  const Field u = random_dipole(g, gen);
  const PhiCoefficients k = phi_coefficients(u, model);
  CHECK(k.a1 > 0.0);
  CHECK(k.b1 > 0.0);
  CHECK(k.A_cross <= 0.0);
  for (double c : {k.a2, k.a3, k.a4, k.b2, k.b3, k.b4}) CHECK(c >= 0.0);

  const NodalSplit sp = split_parts(u);
  std::mt19937_64 eng(3);
  for (int i = 0; i < 10; ++i) {
    const double tau = 2.0 * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    const double theta = 2.0 * static_cast<double>(eng() >> 11) * 0x1.0p-53;
    Field v = tau * sp.plus;
    v.axpy(theta, sp.minus);
    CHECK(rel(k.energy_at(tau, theta), energy(v, model).total) < 1e-10);
    const double T = std::pow(tau, 2 * k.p), Th = std::pow(theta, 2 * k.p);
    CHECK(rel(phi(u, T, Th, model), k.phi(T, Th)) < 1e-10);
  }
  CHECK(phi(u, 0.0, 0.0, model) == 0.0);
  CHECK_THROWS_AS(phi_coefficients(gaussian_bump(g, 1.0), model), DegenerateInput);
  CHECK_THROWS_AS(phi(gaussian_bump(g, 1.0), 1.0, 1.0, model), DegenerateInput);
}

TEST_CASE("nodal projection") {
  const auto g = make_grid(3, 16, 8.0);
  const Model model(nodal_params(), g);
  RandomFieldGenerator gen(7);

  for (int trial = 0; trial < 3; ++trial) {
    const Field u = random_dipole(g, gen);
    const NodalProjection pr = project_nodal(u, model);
    const double S = model.norm2(pr.projected);
    CHECK(pr.tau0 > 0.0);
    CHECK(pr.theta0 > 0.0);
    CHECK(pr.start_spread < 1e-8);
    CHECK(std::max(std::abs(pr.residual_plus), std::abs(pr.residual_minus)) <= 1e-8 * S);

    const NodalProjection again = project_nodal(pr.projected, model);
    CHECK(std::abs(again.tau0 - 1.0) < 1e-8);
    CHECK(std::abs(again.theta0 - 1.0) < 1e-8);

    // Stationarity of the directly evaluated Phi at the maximiser.
    const double eps = 1e-6;
    const double f0 = phi(u, pr.T, pr.Theta, model);
    const double dT = (phi(u, pr.T + eps, pr.Theta, model) - phi(u, pr.T - eps, pr.Theta, model)) / (2 * eps);
    const double dH = (phi(u, pr.T, pr.Theta + eps, model) - phi(u, pr.T, pr.Theta - eps, model)) / (2 * eps);
    CHECK(std::abs(dT) < 1e-6 * (1.0 + std::abs(f0)));
    CHECK(std::abs(dH) < 1e-6 * (1.0 + std::abs(f0)));

    // Phi increases as tau leaves 0 with theta fixed.
    double prev = phi(u, 1e-10 * pr.T, pr.Theta, model);
    for (double f : {1e-8, 1e-6, 1e-4, 1e-2}) {
      const double cur = phi(u, f * pr.T, pr.Theta, model);
      CHECK(cur > prev);
      prev = cur;
    }

    // Domination: u in the nodal set maximises E over tau u+ + theta u-.
    const Field& w = pr.projected;
    const NodalSplit sp = split_parts(w);
    const double Ew = energy(w, model).total;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        Field v = (0.5 * i) * sp.plus;
        v.axpy(0.5 * j, sp.minus);
        CHECK(Ew >= energy(v, model).total - 1e-12 * std::abs(Ew));
      }

    // On the nodal set the Nehari identity holds as well.
    const auto& prm = model.params();
    const double A = model.alpha_nonlocal(w);
    CHECK(rel((0.5 - 0.5 / prm.q) * S + (0.5 / prm.q - 0.5 / prm.p) * A, Ew) < 1e-8);
  }
  CHECK_THROWS_AS(project_nodal(gaussian_bump(g, 1.0), model), DegenerateInput);
}

TEST_CASE("nodal residuals") {
  const auto g = make_grid(3, 16, 8.0);
  const Model model(nodal_params(), g);
  RandomFieldGenerator gen(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Field u = random_dipole(g, gen);
    const NodalResiduals r = nodal_residuals(u, model);
    const double whole = first_variation_pair(u, u, model);
    CHECK(std::abs(r.plus + r.minus - whole) <= 1e-12 * (std::abs(r.plus) + std::abs(r.minus)));
    CHECK(std::abs(r.plus - r.expansion_plus) <= 1e-10 * std::abs(r.plus));
    CHECK(std::abs(r.minus - r.expansion_minus) <= 1e-10 * std::abs(r.minus));
  }
}

TEST_CASE("energy does not split over the parts") {
  const auto g = make_grid(3, 16, 8.0);
  const Model model(nodal_params(), g);
  const Field u = project_nodal(dipole_init(g), model).projected;
  const NodalSplit sp = split_parts(u);
  const double whole = energy(u, model).total;
  const double parts = energy(sp.plus, model).total + energy(sp.minus, model).total;
  CHECK(std::abs(whole - parts) > 1e-3 * std::abs(whole));
}

TEST_CASE("phi concavity") {
  const auto g = make_grid(3, 16, 8.0);
  const Model model(nodal_params(), g);
  RandomFieldGenerator gen(9);
  const auto report = phi_concavity_check(random_dipole(g, gen), model, 30, 11);
  CHECK(report.success);
  CHECK(report.max_eigenvalues.size() == 30);
  CHECK(report.max_eigenvalue < 0.0);
  CHECK(report.maximizer_max_eigenvalue < 0.0);
  CHECK(report.diagonal_max_second_difference < 0.0);
}

TEST_CASE("sign-changing solve") {
  const auto g = make_grid(3, 16, 8.0);
  const Model model(nodal_params(), g);
  const double tol = 1e-7;
  const SolveReport r = signchanging_solve(model, dipole_init(g), tol, 500);
  CHECK(r.converged);
  CHECK(r.grad_norm <= tol);
  const double S = model.norm2(r.field);
  CHECK(std::abs(r.residual_plus) <= tol * S);
  CHECK(std::abs(r.residual_minus) <= tol * S);
  CHECK(r.min_part_norm > 1e-6);
  CHECK(r.plus_norm_history.size() == r.energy_history.size());
  for (std::size_t i = 1; i < r.energy_history.size(); ++i) {
    CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-12 * std::abs(r.energy_history[i - 1]));
  }
  CHECK(l2_norm(r.field + reflect(r.field)) < 1e-6 * l2_norm(r.field));

  const SolveReport ground = groundstate_solve(model, default_groundstate_init(g), tol, 500);
  CHECK(r.final_energy >= ground.final_energy);

  CHECK_THROWS_AS(signchanging_solve(model, gaussian_bump(g, 1.0), tol, 10), DegenerateInput);
}
