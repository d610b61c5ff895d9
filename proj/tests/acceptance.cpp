// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "choquard/cli.hpp"
#include "choquard/errors.hpp"
#include "choquard/nodal.hpp"
#include "choquard/random_fields.hpp"
#include "choquard/spectral.hpp"
#include "choquard/verify.hpp"
#include "oracles.hpp"

using namespace choquard;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double rel_diff(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

ModelParams ground_params() {
  ModelParams p;
  p.dim = 3;
  p.s = 0.5;
  p.alpha = p.beta = 2.0;
  p.p = 2.2;
  p.q = 1.8;
  p.lambda = 0.5;
  p.potential = PotentialSpec::constant(1.0);
  return p;
}

ModelParams nodal_params() {
  ModelParams p = ground_params();
  p.s = 0.6;
  p.p = 2.6;
  p.q = 2.2;
  p.mode = Mode::nodal;
  return p;
}

ModelParams smoke_params() {
  ModelParams p;
  p.dim = 1;
  p.s = 0.75;
  p.alpha = p.beta = 0.5;
  p.p = 3.0;
  p.q = 2.0;
  p.lambda = 0.5;
  p.potential = PotentialSpec::radial_power(1.0, 2.0, 1.0);
  return p;
}

bool strictly_decreasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (!(e[i] < e[i - 1])) return false;
  return true;
}

// ------------------------------------------------------------------ 1
void spectral_correctness(Outcome& o) {
  const double L = 7.0;
  const auto g = make_grid(3, 16, L);
  const double s = 0.35;
  const int waves[][3] = {{1, 0, 0}, {0, 2, -3}, {5, -4, 1}, {8, 0, 0}, {8, 8, 8}, {-7, 3, 6}};
  double worst = 0.0;
  for (const auto& k : waves) {
    const Field u = Field::from_function(g, [&](std::span<const double> x) {
      return std::cos(2.0 * std::numbers::pi * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]) / L);
    });
    const double xi2 = std::pow(2.0 * std::numbers::pi / L, 2) * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    worst = std::max(worst, rel_diff(fractional_laplacian(u, s), std::pow(xi2, s) * u));
  }
  const auto g2 = make_grid(3, 32, 12.0);
  RandomFieldGenerator gen(7);
  const Field u = gen.next(g2);
  const double semi = std::max(
      rel_diff(fractional_laplacian(fractional_laplacian(u, 0.25), 0.25), fractional_laplacian(u, 0.5)),
      rel_diff(fractional_laplacian(fractional_laplacian(u, 0.3), 0.4), fractional_laplacian(u, 0.7)));
  o.detail << "plane-wave rel err " << worst << ", semigroup rel err " << semi;
  o.require(worst < 1e-12, "plane-wave < 1e-12");
  o.require(semi < 1e-10, "semigroup < 1e-10");
}

// ------------------------------------------------------------------ 2
void riesz_oracle(Outcome& o) {
  const double sigma = 1.0;
  const auto g = make_grid(3, 64, 16.0 * sigma);
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -1.5);
  const Field phi = riesz_convolve(gaussian_bump(g, sigma, norm), 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto idx = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < 3; ++a) r2 += g.coordinate(idx[a]) * g.coordinate(idx[a]);
    const double r = std::sqrt(r2);
    const double exact =
        r == 0.0 ? std::sqrt(2.0 / std::numbers::pi) / sigma : std::erf(r / (sigma * std::sqrt(2.0))) / r;
    worst = std::max(worst, std::abs(phi[i] - exact) / exact);
  }
  const RieszKernel kernel(g, 2.0);
  RandomFieldGenerator gen(3);
  double adj = 0.0;
  for (int t = 0; t < 5; ++t) {
    const Field f = gen.next(g), h = gen.next(g);
    const double a = kernel.pair(f, h), b = kernel.pair(h, f);
    adj = std::max(adj, std::abs(a - b) / std::abs(a));
  }
  o.detail << "erf profile max rel err " << worst << ", self-adjointness " << adj;
  o.require(worst < 1e-3, "profile < 1e-3");
  o.require(adj < 1e-12, "self-adjoint < 1e-12");
}

// ------------------------------------------------------------------ 3
void variational_consistency(Outcome& o) {
  const Model model(ground_params(), make_grid(3, 32, 16.0));
  const FdSuite fd = gradient_fd_suite(model, 20, 2024, 1e-5);
  const FdSlope sl = gradient_fd_slope(model, 20, 2024, {1e-3, 1e-4, 1e-5});
  o.detail << "max rel err " << fd.max_rel_error << " at eps=1e-5 over 20 pairs, slope " << sl.slope;
  o.require(fd.max_rel_error < 1e-6, "FD < 1e-6");
  o.require(std::abs(sl.slope - 2.0) <= 0.4, "slope within 20% of 2");
}

// ------------------------------------------------------------------ 4
void nehari_projection(Outcome& o) {
  const Model model(ground_params(), make_grid(3, 32, 16.0));
  const Model limit = model.with_lambda(0.0);
  const auto& prm = model.params();
  const double p = prm.p, q = prm.q, lambda = prm.lambda;
  RandomFieldGenerator gen(4);
  double closed = 0.0, idem = 0.0, id1 = 0.0, id2 = 0.0, worst_L = -1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const Field raw = gen.next(model.grid());
    const double t0 = std::pow(limit.norm2(raw) / limit.alpha_nonlocal(raw), 1.0 / (2 * p - 2));
    closed = std::max(closed, rel(project_nehari(raw, limit).t, t0));

    const Field u = project_nehari(raw, model).projected;
    idem = std::max(idem, std::abs(project_nehari(u, model).t - 1.0));
    const double S = model.norm2(u), A = model.alpha_nonlocal(u), B = model.beta_nonlocal(u);
    const double E = energy(u, model).total;
    id1 = std::max(id1, rel((0.5 - 0.5 / q) * S + (0.5 / q - 0.5 / p) * A, E));
    id2 = std::max(id2, rel((0.5 - 0.5 / p) * A + lambda * (0.5 - 0.5 / q) * B, E));
    worst_L = std::max(worst_L, L_derivative_pair(u, model).direct);
  }
  o.detail << "closed form " << closed << ", idempotence " << idem << ", identities " << id1 << " / " << id2
           << ", max <L'(u),u> " << worst_L;
  o.require(closed < 1e-12, "closed form 1e-12");
  o.require(idem < 1e-10, "idempotence 1e-10");
  o.require(id1 < 1e-10 && id2 < 1e-10, "identities 1e-10");
  o.require(worst_L < 0.0, "L derivative < 0 on 50 fields");
}

// ------------------------------------------------------------------ 5
void groundstate(Outcome& o) {
  const Model model(ground_params(), make_grid(3, 32, 16.0));
  const SolveReport r = groundstate_solve(model, default_groundstate_init(model.grid()), 1e-6, 500);
  const auto g1 = make_grid(1, 128, 16.0);
  const Model smoke(smoke_params(), g1);
  RandomFieldGenerator gen(17);
  const auto a = groundstate_solve(smoke, gen.next_positive(g1), 1e-8, 2000);
  const auto b = groundstate_solve(smoke, gen.next_positive(g1), 1e-8, 2000);
  const double agree = rel(a.final_energy, b.final_energy);
  o.detail << r.iterations << " iterations, grad " << r.grad_norm << ", E " << r.final_energy
           << "; smoke inits agree to " << agree;
  o.require(r.converged && r.grad_norm < 1e-6 && r.iterations <= 500, "converged within 500");
  o.require(r.final_energy > 0.0, "E > 0");
  o.require(agree < 1e-6, "smoke agreement 1e-6");
}

// ------------------------------------------------------------------ 6
void level_ordering(Outcome& o) {
  const double tol = 1e-6;
  const Model model(ground_params(), make_grid(3, 32, 16.0));
  const LevelsReport lv = compare_levels(model, tol, 500);
  o.detail << "m_lambda " << lv.m_lambda << ", m_J " << lv.m_J << ", gap " << lv.m_J - lv.m_lambda << ", t(Q) "
           << lv.t_of_Q;
  o.require(lv.m_lambda < lv.m_J && lv.m_J - lv.m_lambda > 10.0 * tol, "gap > 10 tol");
  o.require(lv.t_of_Q < 1.0, "t(Q) < 1");
}

// ------------------------------------------------------------------ 7
void nodal_machinery(Outcome& o) {
  const auto g = make_grid(3, 32, 16.0);
  const Model model(nodal_params(), g);
  RandomFieldGenerator gen(7);
  const Field u = dipole_init(g) + 0.3 * gen.next(g);

  const NodalProjection pr = project_nodal(u, model);
  const Field& w = pr.projected;
  const double S = model.norm2(w);
  const NodalResiduals res = nodal_residuals(w, model);
  const double worst_res = std::max(std::abs(res.plus), std::abs(res.minus)) / S;

  const ConcavityReport cc = phi_concavity_check(u, model, 100, 11);

  const NodalSplit sp = split_parts(w);
  const double Ew = energy(w, model).total;
  double dom = -1e300;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      Field v = (0.5 * i) * sp.plus;
      v.axpy(0.5 * j, sp.minus);
      dom = std::max(dom, energy(v, model).total - Ew);
    }

  const auto g1 = make_grid(1, 32, 8.0);
  RandomFieldGenerator gen1(5);
  double cross = 0.0;
  for (double s : {0.25, 0.6, 0.9}) {
    const Field v = dipole_init(g1) + 0.5 * gen1.next(g1);
    cross = std::max(cross, rel(cross_gagliardo(split_parts(v), s), oracles::brute_cross(v, s)));
  }
  o.detail << "multi-start spread " << pr.start_spread << ", max Hessian eigenvalue " << cc.max_eigenvalue
           << " over " << cc.max_eigenvalues.size() << " points, max E(tau u+ + theta u-) - E(u) " << dom
           << ", residual/||u||^2 " << worst_res << ", cross vs brute " << cross;
  o.require(pr.start_spread < 1e-8, "multi-start 1e-8");
  o.require(cc.success && cc.max_eigenvalues.size() == 100 && cc.max_eigenvalue < 0.0, "Hessian negative");
  o.require(dom <= 1e-12 * std::abs(Ew), "domination");
  o.require(worst_res < 1e-8, "residuals 1e-8");
  o.require(cross < 1e-8, "cross gagliardo 1e-8");
}

// ------------------------------------------------------------------ 8
void signchanging(Outcome& o) {
  const double tol = 1e-6;
  const auto g = make_grid(3, 32, 16.0);
  const Model model(nodal_params(), g);
  const SolveReport r = signchanging_solve(model, dipole_init(g), tol, 500);
  const double S = model.norm2(r.field);
  const NodalSplit sp = split_parts(r.field);
  const double plus = std::sqrt(model.norm2(sp.plus)), minus = std::sqrt(model.norm2(sp.minus));

  ModelParams gp = nodal_params();
  gp.mode = Mode::groundstate;
  const Model ground(gp, g);
  const SolveReport m = groundstate_solve(ground, default_groundstate_init(g), tol, 500);
  o.detail << r.iterations << " iterations, part norms " << plus << " / " << minus << ", residuals "
           << r.residual_plus / S << " / " << r.residual_minus / S << " (x||u||^2), c " << r.final_energy << " >= m "
           << m.final_energy;
  o.require(r.converged && r.grad_norm <= tol, "converged");
  o.require(plus > 1e-6 && minus > 1e-6, "part norms > 1e-6");
  o.require(std::abs(r.residual_plus) <= tol * S && std::abs(r.residual_minus) <= tol * S, "residuals <= tol");
  o.require(m.converged && r.final_energy >= m.final_energy, "c >= m");
}

// ------------------------------------------------------------------ 9
void brezis_lieb(Outcome& o) {
  const auto g = make_grid(3, 64, 24.0);
  const double L = g.box_length();
  const std::vector<double> zs{L / 12, L / 6, L / 4, L / 3};

  const DecayCurve local = brezis_lieb_local(gaussian_bump(g, 1.0, 0.8), gaussian_bump(g, 1.0), zs, 2.0, 2.0);

  const double sigma = 0.3;
  const Field u = gaussian_bump(g, sigma), w = gaussian_bump(g, sigma, 0.8);
  const Field h = gaussian_bump(g, sigma, 1.0, {sigma, 0.0, 0.0});
  const DecayCurve nonlocal = brezis_lieb_nonlocal(u, w, zs, 2.0, 2.0);
  const DecayCurve pairing = brezis_lieb_pairing(u, w, h, zs, 2.0, 2.0);
  const DecayCurve split = energy_splitting(u, w, zs, Model(ground_params(), g));

  const auto gc = make_grid(3, 64, 16.0);
  const DecayCurve disjoint = brezis_lieb_local(oracles::compact_bump(gc, 0.7), oracles::compact_bump(gc, 1.0),
                                                {2.5, 3.0, 4.0, 5.0}, 1.8, 2.0);
  double dis = 0.0;
  for (double e : disjoint.errors) dis = std::max(dis, e / disjoint.magnitude);

  o.detail << "terminal ratios: local " << local.terminal_ratio << ", nonlocal " << nonlocal.terminal_ratio
           << ", pairing " << pairing.terminal_ratio << ", energy split " << split.terminal_ratio
           << "; disjoint supports " << dis;
  for (const auto* c : {&local, &nonlocal, &pairing, &split}) {
    o.require(strictly_decreasing(c->errors) && c->errors.back() < c->errors.front(), "decreasing curve");
  }
  o.require(local.terminal_ratio < 1e-2, "local < 1e-2");
  o.require(nonlocal.terminal_ratio < 5e-2, "nonlocal < 5e-2");
  o.require(pairing.terminal_ratio < 5e-2, "pairing < 5e-2");
  o.require(split.terminal_ratio < 5e-2, "energy split < 5e-2");
  o.require(dis < 1e-14, "disjoint exact");
}

// ------------------------------------------------------------------ 10
void hls(Outcome& o) {
  const double gamma = 2.0, r = 2.0 / (1.0 + gamma / 3.0);
  const HlsSweep coarse = hls_sweep(make_grid(3, 32, 8.0), gamma, r, r, 20, 99);
  const HlsSweep fine = hls_sweep(make_grid(3, 64, 8.0), gamma, r, r, 20, 99);
  bool finite = true;
  for (const auto* sw : {&coarse, &fine})
    for (double x : sw->ratios) finite = finite && std::isfinite(x) && x > 0.0;

  const auto g = make_grid(3, 32, 8.0);
  const RieszKernel kernel(g, gamma);
  RandomFieldGenerator gen(99);
  double scale = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Field f = gen.next(g), h = gen.next(g);
    const double base = hls_check(f, h, kernel, r, r).ratio();
    for (auto [a, b] : {std::pair{2.0, 0.5}, {-3.0, 7.0}, {1e-3, 1e4}}) {
      scale = std::max(scale, rel(hls_check(a * f, b * h, kernel, r, r).ratio(), base));
    }
  }
  const double drift = std::abs(coarse.max_ratio - fine.max_ratio) / fine.max_ratio;
  o.detail << "max ratio " << coarse.max_ratio << " (n=32) vs " << fine.max_ratio << " (n=64), drift " << drift
           << ", scale invariance " << scale;
  o.require(finite, "finite positive ratios");
  o.require(scale < 1e-12, "scale invariance");
  o.require(drift < 0.05, "refinement within 5%");
}

// ------------------------------------------------------------------ 11
std::string report_text_without_time(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"wall_time\"") == std::string::npos) out += line + '\n';
  return out;
}

void cli_determinism(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / "choquard_acceptance_cli";
  fs::remove_all(root);
  bool identical = true;
  std::vector<std::string> reports;
  for (const char* run : {"a", "b"}) {
    const std::string dir = (root / run).string();
    std::ostringstream out, err;
    const std::vector<std::vector<std::string>> cmds{
        {"solve-ground", "--n", "16", "--box", "8", "--seed", "42", "--out", dir},
        {"solve-nodal", "--n", "16", "--box", "8", "--s", "0.6", "--p", "2.6", "--q", "2.2", "--seed", "42", "--out", dir},
        {"verify", "hls", "--n", "16", "--box", "8", "--count", "5", "--seed", "42", "--out", dir}};
    for (const auto& c : cmds) identical = identical && cli::main_entry(c, out, err) == 0;
  }
  for (const char* name : {"solve-ground.json", "solve-nodal.json", "verify_hls.json", "solve-ground_history.csv"}) {
    const std::string a = report_text_without_time(root / "a" / name);
    identical = identical && !a.empty() && a == report_text_without_time(root / "b" / name);
  }

  const auto message = [](const std::vector<std::string>& args) {
    try {
      cli::parse_args(args);
    } catch (const ParameterError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const struct {
    std::vector<std::string> args;
    const char* needle;
  } cases[] = {
      {{"solve-ground", "--p", "5", "--alpha", "2", "--dim", "3", "--s", "0.5"}, "(N+alpha)/N < p < (N+alpha)/(N-2s)"},
      {{"solve-ground", "--p", "1.5"}, "(N+alpha)/N < p < (N+alpha)/(N-2s)"},
      {{"solve-ground", "--q", "3"}, "(N+beta)/N < q < (N+beta)/(N-2s)"},
      {{"solve-ground", "--q", "1.6"}, "(N+beta)/N < q < (N+beta)/(N-2s)"},
      {{"solve-ground", "--p", "1.7", "--q", "1.8"}, "p > q > 1"},
      {{"solve-nodal", "--q", "1.5"}, "p > q > 2"},
      {{"solve-nodal", "--p", "2.6", "--q", "2.2", "--s", "0.6", "--alpha", "0.5"}, "(N-4s)+ < alpha < N"},
      {{"solve-nodal", "--p", "2.6", "--q", "2.2", "--s", "0.6", "--beta", "0.5"}, "(N-4s)+ < beta < N"},
  };
  int named = 0;
  for (const auto& c : cases) named += message(c.args).find(c.needle) != std::string::npos;
  fs::remove_all(root);
  o.detail << "reports bit-identical: " << (identical ? "yes" : "no") << ", validation messages naming the inequality "
           << named << "/" << std::size(cases);
  o.require(identical, "determinism");
  o.require(named == static_cast<int>(std::size(cases)), "named inequalities");
}

}  // namespace

int main() {
  const struct {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> fn;
  } criteria[] = {
      {1, "spectral correctness", 60, spectral_correctness},
      {2, "Riesz oracle", 60, riesz_oracle},
      {3, "variational consistency", 60, variational_consistency},
      {4, "Nehari projection", 60, nehari_projection},
      {5, "groundstate solve", 300, groundstate},
      {6, "level ordering", 600, level_ordering},
      {7, "nodal machinery", 600, nodal_machinery},
      {8, "sign-changing solve", 600, signchanging},
      {9, "Brezis-Lieb decay suites", 300, brezis_lieb},
      {10, "HLS sweep", 300, hls},
      {11, "CLI determinism and validation", 60, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_s, "runtime budget");
    if (!o.pass) ++failed;
    std::printf("%s criterion %d (%s): %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
