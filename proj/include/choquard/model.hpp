#pragma once

#include <memory>

#include "choquard/field.hpp"
#include "choquard/params.hpp"
#include "choquard/riesz.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

/// Samples V on the grid and enforces min V >= declared V0 > 0.
/// Throws PotentialViolation otherwise.
Field sample_potential(const PotentialSpec& spec, const GridSpec& grid);

/// |u|^r pointwise.
Field abs_pow(const Field& u, double r);
/// sign(u) |u|^e pointwise, 0 where u = 0.
Field odd_pow(const Field& u, double e);

/// Quadrature of (I_gamma * |u|^r) |u|^r.
double nonlocal_term(const Field& u, double gamma, double r);

/// Decomposition of the energy; total = seminorm_half + potential_half - alpha_term - beta_term.
struct EnergyBreakdown {
  double seminorm_half = 0.0;   // [u]^2 / 2
  double potential_half = 0.0;  // int V u^2 / 2
  double alpha_term = 0.0;      // A(u) / 2p
  double beta_term = 0.0;       // lambda B(u) / 2q
  double total = 0.0;
};

/// A discretised problem: parameters plus the grid, the sampled potential
/// and the spectral/Riesz operators built once. Copies share the operators.
/// Construction checks the potential but not the mode hypotheses; run
/// validate_params first when those matter.
class Model {
 public:
  Model(ModelParams params, GridSpec grid);

  const ModelParams& params() const noexcept { return params_; }
  const GridSpec& grid() const noexcept { return grid_; }
  const Field& potential() const noexcept { return ops_->potential; }
  double potential_mean() const noexcept { return ops_->potential_mean; }
  const FractionalSymbol& symbol() const noexcept { return ops_->symbol; }
  const RieszKernel& alpha_kernel() const noexcept { return ops_->alpha; }
  const RieszKernel& beta_kernel() const noexcept { return ops_->beta; }
  bool constant_potential() const noexcept { return params_.potential.is_constant(); }

  /// Same discretisation with a different lambda (operators shared).
  Model with_lambda(double lambda) const;

  /// X_V^s inner product and squared norm.
  double inner(const Field& u, const Field& v) const;
  double norm2(const Field& u) const { return inner(u, u); }

  /// A(u) = int (I_alpha * |u|^p)|u|^p and B(u) = int (I_beta * |u|^q)|u|^q (no lambda).
  double alpha_nonlocal(const Field& u) const;
  double beta_nonlocal(const Field& u) const;

 private:
  struct Operators {
    Field potential;
    double potential_mean;
    FractionalSymbol symbol;
    RieszKernel alpha;
    RieszKernel beta;
  };

  ModelParams params_;
  GridSpec grid_;
  std::shared_ptr<const Operators> ops_;
};

EnergyBreakdown energy(const Field& u, const Model& model);

/// Energy of the lambda = 0 problem.
double functional_J(const Field& u, const Model& model);

/// <E'(u), v> = (u, v)_X - int (I_a*|u|^p)|u|^{p-2}u v - lambda int (I_b*|u|^q)|u|^{q-2}u v.
double first_variation_pair(const Field& u, const Field& v, const Model& model);

/// Strong-form residual (-Delta)^s u + V u - (I_a*|u|^p)|u|^{p-2}u - lambda (I_b*|u|^q)|u|^{q-2}u.
Field strong_residual(const Field& u, const Model& model);

/// Riesz representative g of E'(u) in the X_V^s inner product:
/// inner(g, h) = first_variation_pair(u, h) for every h, up to the linear-solve tolerance.
Field gradient_field(const Field& u, const Model& model, double tol);

struct HlsCheck {
  double lhs = 0.0;     // |int (I_gamma * f) g|
  double norm_f = 0.0;  // ||f||_r
  double norm_g = 0.0;  // ||g||_t
  double ratio() const { return lhs / (norm_f * norm_g); }
};

/// Throws ParameterError unless 1/r + 1/t = 1 + gamma/dim.
HlsCheck hls_check(const Field& f, const Field& g, double gamma, double r, double t);
HlsCheck hls_check(const Field& f, const Field& g, const RieszKernel& kernel, double r, double t);

}  // namespace choquard
