#include "choquard/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "choquard/errors.hpp"

namespace choquard {

Field sample_potential(const PotentialSpec& spec, const GridSpec& grid) {
  if (!(spec.declared_v0 > 0.0)) {
    throw PotentialViolation("potential " + spec.to_string() +
                             " violates inf V >= V0 > 0: declared V0 = " +
                             format_real(spec.declared_v0));
  }
  Field v = Field::from_function(grid, [&](std::span<const double> x) { return spec(x); });
  const double vmin = min_value(v);
  if (!(vmin >= spec.declared_v0)) {
    throw PotentialViolation("potential " + spec.to_string() + " has grid minimum " +
                             format_real(vmin) + " below declared V0 = " +
                             format_real(spec.declared_v0));
  }
  if (!v.all_finite()) throw PotentialViolation("potential " + spec.to_string() + " is not finite on the grid");
  return v;
}

Field abs_pow(const Field& u, double r) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(std::abs(u[i]), r);
  return out;
}

Field odd_pow(const Field& u, double e) {
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u[i];
    out[i] = x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x);
  }
  return out;
}

double nonlocal_term(const Field& u, double gamma, double r) {
  if (!(r > 1.0)) throw ParameterError("nonlocal_term: exponent must exceed 1");
  const RieszKernel kernel(u.grid(), gamma);
  const Field density = abs_pow(u, r);
  return kernel.pair(density, density);
}

Model::Model(ModelParams params, GridSpec grid) : params_(std::move(params)), grid_(grid) {
  if (params_.dim != grid_.dim()) {
    throw ParameterError("model: params dim " + std::to_string(params_.dim) +
                         " does not match grid dim " + std::to_string(grid_.dim()));
  }
  Field v = sample_potential(params_.potential, grid_);
  const auto vals = v.values();
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(v.size());
  ops_ = std::make_shared<const Operators>(Operators{
      std::move(v), mean, FractionalSymbol(grid_, params_.s), RieszKernel(grid_, params_.alpha),
      RieszKernel(grid_, params_.beta)});
}

Model Model::with_lambda(double lambda) const {
  Model copy = *this;
  copy.params_.lambda = lambda;
  return copy;
}

double Model::inner(const Field& u, const Field& v) const {
  require_same_grid(u, v, "inner");
  const Field& V = ops_->potential;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += V[i] * u[i] * v[i];
  return ops_->symbol.form(u, v) + grid_.cell_volume() * acc;
}

double Model::alpha_nonlocal(const Field& u) const {
  const Field d = abs_pow(u, params_.p);
  return ops_->alpha.pair(d, d);
}

double Model::beta_nonlocal(const Field& u) const {
  const Field d = abs_pow(u, params_.q);
  return ops_->beta.pair(d, d);
}

EnergyBreakdown energy(const Field& u, const Model& model) {
  const auto& prm = model.params();
  EnergyBreakdown e;
  e.seminorm_half = 0.5 * model.symbol().form(u, u);
  e.potential_half = 0.5 * quad_dot(hadamard(model.potential(), u), u);
  e.alpha_term = model.alpha_nonlocal(u) / (2.0 * prm.p);
  e.beta_term = prm.lambda == 0.0 ? 0.0 : prm.lambda * model.beta_nonlocal(u) / (2.0 * prm.q);
  e.total = e.seminorm_half + e.potential_half - e.alpha_term - e.beta_term;
  return e;
}

double functional_J(const Field& u, const Model& model) {
  return energy(u, model.with_lambda(0.0)).total;
}

namespace {

// (I_a*|u|^p)|u|^{p-2}u + lambda (I_b*|u|^q)|u|^{q-2}u
Field nonlinearity(const Field& u, const Model& model) {
  const auto& prm = model.params();
  Field out = hadamard(model.alpha_kernel().apply(abs_pow(u, prm.p)), odd_pow(u, prm.p - 1.0));
  if (prm.lambda != 0.0) {
    out.axpy(prm.lambda,
             hadamard(model.beta_kernel().apply(abs_pow(u, prm.q)), odd_pow(u, prm.q - 1.0)));
  }
  return out;
}

}  // namespace

double first_variation_pair(const Field& u, const Field& v, const Model& model) {
  require_same_grid(u, v, "first_variation_pair");
  return model.inner(u, v) - quad_dot(nonlinearity(u, model), v);
}

Field strong_residual(const Field& u, const Model& model) {
  Field rho = model.symbol().apply(u);
  rho += hadamard(model.potential(), u);
  rho -= nonlinearity(u, model);
  return rho;
}

Field gradient_field(const Field& u, const Model& model, double tol) {
  return solve_linear_operator(strong_residual(u, model), model.params().s, model.potential(), tol);
}

HlsCheck hls_check(const Field& f, const Field& g, const RieszKernel& kernel, double r, double t) {
  require_same_grid(f, g, "hls_check");
  const int d = f.grid().dim();
  if (!(r >= 1.0 && t >= 1.0) || std::abs(1.0 / r + 1.0 / t - 1.0 - kernel.order() / d) > 1e-10) {
    throw ParameterError("hls_check: exponents must satisfy 1/r + 1/t = 1 + gamma/N, got r = " +
                         format_real(r) + ", t = " + format_real(t));
  }
  HlsCheck out;
  out.lhs = std::abs(kernel.pair(f, g));
  out.norm_f = lp_norm(f, r);
  out.norm_g = lp_norm(g, t);
  return out;
}

HlsCheck hls_check(const Field& f, const Field& g, double gamma, double r, double t) {
  return hls_check(f, g, RieszKernel(f.grid(), gamma), r, t);
}

}  // namespace choquard
