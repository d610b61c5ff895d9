#include "choquard/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "choquard/errors.hpp"
#include "fft.hpp"

namespace choquard {

using detail::Complex;
using detail::RealFft;

namespace {

void require_order(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ParameterError("fractional order s must lie in (0,1), got " + std::to_string(s));
  }
}

double euclid_dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void require_positive_potential(const Field& V) {
  const double vmin = min_value(V);
  if (!(vmin > 0.0)) {
    throw PotentialViolation("potential violates inf V >= V0 > 0: grid minimum is " +
                             std::to_string(vmin));
  }
}

}  // namespace

FractionalSymbol::FractionalSymbol(const GridSpec& grid, double s) : grid_(grid), s_(s) {
  require_order(s);
  const auto& fft = RealFft::get(grid.dim(), grid.n());
  values_.resize(fft.complex_size());
  const double dk = 2.0 * std::numbers::pi / grid.box_length();
  detail::for_each_mode(grid.dim(), grid.n(), [&](std::size_t i, const int* k, double) {
    double xi2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) xi2 += (dk * k[a]) * (dk * k[a]);
    values_[i] = xi2 == 0.0 ? 0.0 : std::pow(xi2, s);
  });
}

Field FractionalSymbol::apply(const Field& u) const {
  if (!(u.grid() == grid_)) throw ParameterError("fractional_laplacian: grid mismatch");
  const auto& fft = RealFft::get(grid_.dim(), grid_.n());
  auto spec = fft.forward(u.values());
  const double norm = 1.0 / static_cast<double>(fft.real_size());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= values_[i] * norm;
  Field out(grid_);
  auto back = fft.inverse(spec);
  std::copy(back.begin(), back.end(), out.values().begin());
  return out;
}

Field FractionalSymbol::apply_shifted_inverse(const Field& f, double shift) const {
  const auto& fft = RealFft::get(grid_.dim(), grid_.n());
  auto spec = fft.forward(f.values());
  const double norm = 1.0 / static_cast<double>(fft.real_size());
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= norm / (values_[i] + shift);
  Field out(grid_);
  auto back = fft.inverse(spec);
  std::copy(back.begin(), back.end(), out.values().begin());
  return out;
}

double FractionalSymbol::form(const Field& u, const Field& v) const {
  require_same_grid(u, v, "gagliardo_form");
  if (!(u.grid() == grid_)) throw ParameterError("gagliardo_form: grid mismatch");
  const auto& fft = RealFft::get(grid_.dim(), grid_.n());
  const auto uh = fft.forward(u.values());
  const auto vh = fft.forward(v.values());
  double acc = 0.0;
  detail::for_each_mode(grid_.dim(), grid_.n(), [&](std::size_t i, const int*, double w) {
    acc += w * values_[i] * (uh[i].real() * vh[i].real() + uh[i].imag() * vh[i].imag());
  });
  return acc * grid_.cell_volume() / static_cast<double>(fft.real_size());
}

Field fractional_laplacian(const Field& u, double s) {
  return FractionalSymbol(u.grid(), s).apply(u);
}

double gagliardo_form(const Field& u, const Field& v, double s) {
  require_same_grid(u, v, "gagliardo_form");
  return FractionalSymbol(u.grid(), s).form(u, v);
}

double xvs_inner(const Field& u, const Field& v, double s, const Field& V) {
  require_same_grid(u, v, "xvs_inner");
  require_same_grid(u, V, "xvs_inner");
  require_positive_potential(V);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += V[i] * u[i] * v[i];
  return gagliardo_form(u, v, s) + u.grid().cell_volume() * acc;
}

double lp_norm(const Field& u, double r) {
  if (!(r >= 1.0)) throw ParameterError("lp_norm: exponent must be >= 1, got " + std::to_string(r));
  double acc = 0.0;
  for (double x : u.values()) acc += std::pow(std::abs(x), r);
  return std::pow(u.grid().cell_volume() * acc, 1.0 / r);
}

double concentration_function(const Field& u, double r, double radius) {
  const GridSpec& g = u.grid();
  if (!(radius > 0.0) || radius > 0.5 * g.box_length()) {
    throw ParameterError("concentration_function: radius must lie in (0, L/2], got " +
                         std::to_string(radius));
  }
  // Periodic ball indicator centred at index 0, convolved with |u|^r by FFT.
  const double h = g.spacing();
  Field ball(g);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const auto idx = g.unflatten(i);
    double d2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = detail::signed_mode(idx[a], g.n()) * h;
      d2 += d * d;
    }
    ball[i] = d2 <= radius * radius * (1.0 + 1e-12) ? 1.0 : 0.0;
  }
  Field density(g);
  for (std::size_t i = 0; i < u.size(); ++i) density[i] = std::pow(std::abs(u[i]), r);

  const auto& fft = RealFft::get(g.dim(), g.n());
  auto a = fft.forward(density.values());
  const auto b = fft.forward(ball.values());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  const auto conv = fft.inverse(a);
  const double scale = g.cell_volume() / static_cast<double>(fft.real_size());
  const double best = *std::max_element(conv.begin(), conv.end());
  return std::max(0.0, best * scale);
}

Field apply_linear_operator(const Field& w, double s, const Field& V) {
  require_same_grid(w, V, "apply_linear_operator");
  Field out = fractional_laplacian(w, s);
  for (std::size_t i = 0; i < w.size(); ++i) out[i] += V[i] * w[i];
  return out;
}

Field solve_linear_operator(const Field& f, double s, const Field& V, double tol, int max_iter,
                            LinearSolveStats* stats) {
  require_same_grid(f, V, "solve_linear_operator");
  require_positive_potential(V);
  if (!(tol > 0.0)) throw ParameterError("solve_linear_operator: tol must be positive");

  const FractionalSymbol symbol(f.grid(), s);
  const auto vals = V.values();
  const double vbar = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(V.size());

  auto apply_op = [&](const Field& w) {
    Field out = symbol.apply(w);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] += V[i] * w[i];
    return out;
  };

  Field w(f.grid());
  const double fnorm = std::sqrt(euclid_dot(f.values(), f.values()));
  if (fnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return w;
  }

  Field r = f;
  Field z = symbol.apply_shifted_inverse(r, vbar);
  Field p = z;
  double rz = euclid_dot(r.values(), z.values());
  double rel = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Field ap = apply_op(p);
    const double alpha = rz / euclid_dot(p.values(), ap.values());
    w.axpy(alpha, p);
    r.axpy(-alpha, ap);
    rel = std::sqrt(euclid_dot(r.values(), r.values())) / fnorm;
    if (rel <= tol) {
      if (stats) *stats = {it, rel};
      return w;
    }
    z = symbol.apply_shifted_inverse(r, vbar);
    const double rz_next = euclid_dot(r.values(), z.values());
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  throw NonConvergence("solve_linear_operator: no convergence in " + std::to_string(max_iter) +
                           " iterations, relative residual " + std::to_string(rel),
                       rel);
}

}  // namespace choquard
