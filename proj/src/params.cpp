#include "choquard/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "choquard/errors.hpp"

namespace choquard {

namespace {

std::string short_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("config: value for '" + key + "' is not a number: '" + text + "'");
  }
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v != std::floor(v)) throw ParameterError("config: value for '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  return out;
}

PotentialFamily parse_family(const std::string& name) {
  if (name == "const" || name == "constant") return PotentialFamily::constant;
  if (name == "radial" || name == "radial_power") return PotentialFamily::radial_power;
  if (name == "osc" || name == "oscillating") return PotentialFamily::oscillating;
  throw ParameterError("potential: unknown family '" + name +
                       "' (expected const, radial or osc)");
}

PotentialSpec make_potential(PotentialFamily family, const std::vector<double>& p) {
  switch (family) {
    case PotentialFamily::constant:
      if (p.size() != 1) throw ParameterError("potential const expects 1 parameter (V0)");
      return PotentialSpec::constant(p[0]);
    case PotentialFamily::radial_power:
      if (p.size() != 3) throw ParameterError("potential radial expects 3 parameters (a,b,c)");
      return PotentialSpec::radial_power(p[0], p[1], p[2]);
    case PotentialFamily::oscillating:
      if (p.size() != 1) throw ParameterError("potential osc expects 1 parameter (c)");
      return PotentialSpec::oscillating(p[0]);
  }
  throw ParameterError("potential: unknown family");
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

PotentialSpec PotentialSpec::constant(double v0) {
  return {PotentialFamily::constant, {v0}, v0};
}

PotentialSpec PotentialSpec::radial_power(double a, double b, double c) {
  if (a < 0.0 || b <= 0.0) {
    throw ParameterError("potential radial: need a >= 0 and b > 0 so that inf V = c");
  }
  return {PotentialFamily::radial_power, {a, b, c}, c};
}

PotentialSpec PotentialSpec::oscillating(double c) {
  return {PotentialFamily::oscillating, {c}, c};
}

PotentialSpec PotentialSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ParameterError("potential: expected family:params, got '" + text + "'");
  }
  const auto family = parse_family(trim(text.substr(0, colon)));
  return make_potential(family, parse_list("potential", text.substr(colon + 1)));
}

std::string PotentialSpec::family_name() const {
  switch (family) {
    case PotentialFamily::constant: return "const";
    case PotentialFamily::radial_power: return "radial";
    case PotentialFamily::oscillating: return "osc";
  }
  return "?";
}

std::string PotentialSpec::to_string() const {
  std::string out = family_name() + ":";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += format_real(params[i]);
  }
  return out;
}

double PotentialSpec::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double r = std::sqrt(r2);
  switch (family) {
    case PotentialFamily::constant:
      return params[0];
    case PotentialFamily::radial_power:
      return params[0] * std::pow(r, params[1]) + params[2];
    case PotentialFamily::oscillating: {
      const double sr = std::sin(r);
      return r2 * r2 * sr * sr + params[0];
    }
  }
  return 0.0;
}

bool PotentialSpec::v2_flag() const noexcept {
  switch (family) {
    case PotentialFamily::constant: return true;
    case PotentialFamily::radial_power: return params[0] > 0.0 && params[2] > 0.0;
    case PotentialFamily::oscillating: return true;
  }
  return false;
}

std::string to_string(Mode mode) { return mode == Mode::groundstate ? "groundstate" : "nodal"; }

Mode parse_mode(const std::string& text) {
  if (text == "groundstate" || text == "ground") return Mode::groundstate;
  if (text == "nodal") return Mode::nodal;
  throw ParameterError("mode must be groundstate or nodal, got '" + text + "'");
}

ExponentWindow exponent_window(int dim, double s, double order) {
  ExponentWindow w;
  w.lower = (dim + order) / dim;
  const double denom = dim - 2.0 * s;
  if (denom > 0.0) w.upper = (dim + order) / denom;
  return w;
}

ValidatedParams validate_params(const ModelParams& params) {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  const int d = params.dim;

  if (d < 1 || d > 3) violations.push_back("dim must be 1, 2 or 3, got " + std::to_string(d));
  if (!(params.s > 0.0 && params.s < 1.0)) {
    violations.push_back("s must lie in (0, 1), got " + short_real(params.s));
  }
  auto check_order = [&](const char* name, double v) {
    if (!(v > 0.0 && v < d)) {
      violations.push_back(std::string(name) + " must lie in (0, N) = (0, " + std::to_string(d) +
                           "), got " + short_real(v));
    }
  };
  check_order("alpha", params.alpha);
  check_order("beta", params.beta);

  if (violations.empty()) {
    auto check_window = [&](const char* exp_name, const char* order_name, double x, double order) {
      const auto w = exponent_window(d, params.s, order);
      if (!w.contains(x)) {
        std::string msg = std::string(exp_name) + "-window violated: (N+" + order_name + ")/N < " +
                          exp_name + " < (N+" + order_name + ")/(N-2s) requires " + exp_name +
                          " in (" + short_real(w.lower) + ", " + short_real(w.upper) + "), got " +
                          exp_name + " = " + short_real(x);
        if (x >= w.upper) msg += " (upper bound " + short_real(w.upper) + " is strict)";
        if (x <= w.lower) msg += " (lower bound " + short_real(w.lower) + " is strict)";
        violations.push_back(msg);
      }
    };
    check_window("p", "alpha", params.p, params.alpha);
    check_window("q", "beta", params.q, params.beta);
  }

  if (params.mode == Mode::groundstate) {
    if (!(params.p > params.q && params.q > 1.0)) {
      violations.push_back("groundstate mode requires p > q > 1, got p = " + short_real(params.p) +
                           ", q = " + short_real(params.q));
    }
    if (!(params.lambda > 0.0)) {
      violations.push_back("groundstate mode requires lambda > 0, got lambda = " +
                           short_real(params.lambda));
    }
  } else {
    if (!(params.p > params.q && params.q > 2.0)) {
      violations.push_back("nodal mode requires p > q > 2, got p = " + short_real(params.p) +
                           ", q = " + short_real(params.q));
    }
    const double floor = std::max(0.0, d - 4.0 * params.s);
    auto check_nodal_order = [&](const char* name, double v) {
      if (!(v > floor && v < d)) {
        violations.push_back(std::string("nodal mode requires (N-4s)+ < ") + name +
                             " < N, i.e. " + name + " in (" + short_real(floor) + ", " +
                             std::to_string(d) + "), got " + name + " = " + short_real(v));
      }
    };
    check_nodal_order("alpha", params.alpha);
    check_nodal_order("beta", params.beta);
    if (params.lambda < 0.0) {
      warnings.push_back("nodal mode with lambda < 0: concavity of the fibre map rests on p,q > 2");
    }
    if (!params.potential.v2_flag()) {
      warnings.push_back("potential family " + params.potential.to_string() +
                         " is not flagged as satisfying the finite-measure sublevel condition");
    }
  }
  if (!(params.potential.declared_v0 > 0.0)) {
    violations.push_back("potential requires inf V >= V0 > 0, declared V0 = " +
                         short_real(params.potential.declared_v0));
  }
  if (d < 3 && d >= 1) {
    warnings.push_back("dim = " + std::to_string(d) +
                       " < 3: outside the N >= 3 setting, windows evaluated with N = dim");
  }

  if (!violations.empty()) {
    std::string msg = "invalid parameters:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ParameterError(msg);
  }
  return {params, std::move(warnings)};
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return parse_key_values(in);
}

void apply_key_values(const KeyValues& kv, ProblemSetup& setup) {
  std::string family;
  std::string plist;
  for (const auto& [key, value] : kv) {
    if (key == "dim") setup.model.dim = parse_int(key, value);
    else if (key == "n") setup.n = parse_int(key, value);
    else if (key == "box") setup.box = parse_real(key, value);
    else if (key == "s") setup.model.s = parse_real(key, value);
    else if (key == "alpha") setup.model.alpha = parse_real(key, value);
    else if (key == "beta") setup.model.beta = parse_real(key, value);
    else if (key == "p") setup.model.p = parse_real(key, value);
    else if (key == "q") setup.model.q = parse_real(key, value);
    else if (key == "lambda") setup.model.lambda = parse_real(key, value);
    else if (key == "mode") setup.model.mode = parse_mode(value);
    else if (key == "potential.family") family = value;
    else if (key == "potential.params") plist = value;
    else throw ParameterError("config: unknown key '" + key + "'");
  }
  if (!family.empty() || !plist.empty()) {
    const auto fam = family.empty() ? setup.model.potential.family : parse_family(family);
    const auto values = plist.empty() ? setup.model.potential.params : parse_list("potential.params", plist);
    setup.model.potential = make_potential(fam, values);
  }
}

std::string format_key_values(const ProblemSetup& setup) {
  const auto& m = setup.model;
  std::ostringstream out;
  out << "dim=" << m.dim << '\n'
      << "n=" << setup.n << '\n'
      << "box=" << format_real(setup.box) << '\n'
      << "s=" << format_real(m.s) << '\n'
      << "alpha=" << format_real(m.alpha) << '\n'
      << "beta=" << format_real(m.beta) << '\n'
      << "p=" << format_real(m.p) << '\n'
      << "q=" << format_real(m.q) << '\n'
      << "lambda=" << format_real(m.lambda) << '\n'
      << "potential.family=" << m.potential.family_name() << '\n';
  out << "potential.params=";
  for (std::size_t i = 0; i < m.potential.params.size(); ++i) {
    if (i) out << ',';
    out << format_real(m.potential.params[i]);
  }
  out << '\n' << "mode=" << to_string(m.mode) << '\n';
  return out.str();
}

}  // namespace choquard
