#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace choquard {

enum class PotentialFamily { constant, radial_power, oscillating };

/// Potential families:
///   constant(V0)          V = V0
///   radial_power(a, b, c) V = a |x|^b + c
///   oscillating(c)        V = |x|^4 sin^2|x| + c
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::constant;
  std::vector<double> params{1.0};
  /// Lower bound the sampled potential must respect on every grid.
  double declared_v0 = 1.0;

  static PotentialSpec constant(double v0);
  static PotentialSpec radial_power(double a, double b, double c);
  static PotentialSpec oscillating(double c);

  /// Parses "const:1", "radial:a,b,c" or "osc:c" (long family names also accepted).
  static PotentialSpec parse(const std::string& text);
  std::string to_string() const;
  std::string family_name() const;

  double operator()(std::span<const double> x) const;

  /// Documentation flag: family is treated as satisfying the finite-measure
  /// sublevel-set condition. Not machine-checkable on a finite grid.
  bool v2_flag() const noexcept;
  bool is_constant() const noexcept { return family == PotentialFamily::constant; }
};

enum class Mode { groundstate, nodal };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct ModelParams {
  int dim = 3;
  double s = 0.5;
  double alpha = 2.0;
  double beta = 2.0;
  double p = 2.2;
  double q = 1.8;
  double lambda = 0.5;
  PotentialSpec potential{};
  Mode mode = Mode::groundstate;
};

/// Open admissible interval (lower, upper) for an exponent, upper = +inf when dim <= 2s.
struct ExponentWindow {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  bool contains(double x) const noexcept { return x > lower && x < upper; }
};

/// (dim + order)/dim < exponent < (dim + order)/(dim - 2s)
ExponentWindow exponent_window(int dim, double s, double order);

struct ValidatedParams {
  ModelParams params;
  std::vector<std::string> warnings;
};

/// Checks every hypothesis of the declared mode. Throws ParameterError whose
/// message names each violated inequality and its admissible interval.
ValidatedParams validate_params(const ModelParams& params);

// Flat key=value configuration. Keys: dim, n, box, s, alpha, beta, p, q,
// lambda, potential.family, potential.params, mode. '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);

struct ProblemSetup {
  ModelParams model;
  int n = 32;
  double box = 16.0;
};

/// Applies recognised keys onto setup; unknown keys raise ParameterError.
void apply_key_values(const KeyValues& kv, ProblemSetup& setup);
std::string format_key_values(const ProblemSetup& setup);

/// Decimal rendering with round-trip precision.
std::string format_real(double x);

}  // namespace choquard
