#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "choquard/params.hpp"

namespace choquard::cli {

enum class Command { solve_ground, solve_nodal, compare_levels, verify, sweep };
enum class VerifyVerb { bl_local, bl_nonlocal, bl_pairing, energy_split, hls, grad };

enum class ExitCode : int { ok = 0, validation = 2, nonconv = 3, collapse = 4, io = 5 };

std::string to_string(Command c);
std::string to_string(VerifyVerb v);
/// "ok", "validation", "nonconv", "collapse" or "io".
std::string status_name(ExitCode code);

struct RunConfig {
  Command command = Command::solve_ground;
  VerifyVerb verb = VerifyVerb::hls;
  ProblemSetup setup;
  double tol = 1e-6;
  int max_iter = 500;
  /// 0 selects the deterministic default initial guess; other values draw a
  /// random one. Verify sub-verbs use it for their sample draws.
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string field_out;  // ".csv" suffix selects CSV, anything else CHQF
  std::vector<double> lambdas{0.02, 0.1, 0.5};
  int threads = 0;  // 0 = hardware concurrency

  // verify
  int count = 20;
  double eps = 1e-5;
  std::optional<double> gamma;  // Riesz order, defaults to alpha
  std::optional<double> r_exp;  // defaults to p (bl-*) or the HLS-conjugate value
  std::optional<double> t_exp;
  std::optional<double> sigma;  // bump width, defaults to L/80
  std::vector<double> translations;  // defaults to L/12, L/6, L/4, L/3
};

/// --help / --version output; not an error.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses argv (without the program name), merges a --config key=value file
/// under the flags and validates everything. Throws ParameterError naming the
/// violated condition, IoError for an unreadable config, HelpRequested.
RunConfig parse_args(const std::vector<std::string>& args);

/// Executes the command, writes artifacts under out_dir and finishes `log`
/// with a "status=..." line.
ExitCode run(const RunConfig& config, std::ostream& log);

/// parse_args + run with every failure mapped to an exit code; always prints
/// the status line to `out`.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace choquard::cli
