#include "choquard/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "choquard/errors.hpp"
#include "choquard/field_io.hpp"
#include "choquard/nodal.hpp"
#include "choquard/random_fields.hpp"
#include "choquard/verify.hpp"

namespace choquard::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(Command c) {
  switch (c) {
    case Command::solve_ground: return "solve-ground";
    case Command::solve_nodal: return "solve-nodal";
    case Command::compare_levels: return "compare-levels";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
  }
  return "?";
}

std::string to_string(VerifyVerb v) {
  switch (v) {
    case VerifyVerb::bl_local: return "bl-local";
    case VerifyVerb::bl_nonlocal: return "bl-nonlocal";
    case VerifyVerb::bl_pairing: return "bl-pairing";
    case VerifyVerb::energy_split: return "energy-split";
    case VerifyVerb::hls: return "hls";
    case VerifyVerb::grad: return "grad";
  }
  return "?";
}

std::string status_name(ExitCode code) {
  switch (code) {
    case ExitCode::ok: return "ok";
    case ExitCode::validation: return "validation";
    case ExitCode::nonconv: return "nonconv";
    case ExitCode::collapse: return "collapse";
    case ExitCode::io: return "io";
  }
  return "?";
}

namespace {

// Model flags gathered as optionals so that only explicitly given ones
// override the config file.
struct FlagValues {
  std::optional<int> dim, n, max_iter, threads, count;
  std::optional<double> box, s, alpha, beta, p, q, lambda, tol, eps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> potential, mode, out, field_out, config, lambdas, translations;
};

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ParameterError(key + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ParameterError(key + ": empty list");
  return out;
}

double parse_real_value(const std::string& key, const std::string& text) {
  const auto v = parse_real_list(key, text);
  if (v.size() != 1) throw ParameterError(key + ": expected a single number");
  return v.front();
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParameterError(key + ": '" + text + "' is not an integer");
  return v;
}

// Run-level keys are consumed here; the rest describe the problem.
void apply_config_file(const std::string& path, RunConfig& cfg, bool& mode_set) {
  KeyValues kv = read_key_values(path);
  KeyValues problem;
  for (const auto& [key, value] : kv) {
    if (key == "tol") cfg.tol = parse_real_value(key, value);
    else if (key == "max_iter" || key == "max-iter") cfg.max_iter = static_cast<int>(parse_integer(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    else if (key == "out") cfg.out_dir = value;
    else if (key == "field_out" || key == "field-out") cfg.field_out = value;
    else if (key == "lambdas") cfg.lambdas = parse_real_list(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_integer(key, value));
    else if (key == "count") cfg.count = static_cast<int>(parse_integer(key, value));
    else if (key == "eps") cfg.eps = parse_real_value(key, value);
    else if (key == "gamma") cfg.gamma = parse_real_value(key, value);
    else if (key == "r") cfg.r_exp = parse_real_value(key, value);
    else if (key == "t") cfg.t_exp = parse_real_value(key, value);
    else if (key == "sigma") cfg.sigma = parse_real_value(key, value);
    else if (key == "translations") cfg.translations = parse_real_list(key, value);
    else if (key == "V" || key == "potential") cfg.setup.model.potential = PotentialSpec::parse(value);
    else problem[key] = value;
  }
  if (problem.count("mode")) mode_set = true;
  apply_key_values(problem, cfg.setup);
}

void add_flags(CLI::App& app, FlagValues& f, RunConfig& cfg) {
  app.add_option("--dim", f.dim, "spatial dimension (1, 2 or 3)");
  app.add_option("--n", f.n, "grid points per axis (power of two)");
  app.add_option("--box", f.box, "box side length L");
  app.add_option("--s", f.s, "fractional order s in (0, 1)");
  app.add_option("--alpha", f.alpha, "Riesz order of the p-term");
  app.add_option("--beta", f.beta, "Riesz order of the q-term");
  app.add_option("--p", f.p, "exponent p");
  app.add_option("--q", f.q, "exponent q");
  app.add_option("--lambda", f.lambda, "coupling lambda");
  app.add_option("--V", f.potential, "potential family:params, e.g. const:1, radial:a,b,c, osc:c");
  app.add_option("--mode", f.mode, "groundstate or nodal");
  app.add_option("--tol", f.tol, "stopping tolerance in (0, 1e-2]");
  app.add_option("--max-iter", f.max_iter, "iteration cap in [1, 1e6]");
  app.add_option("--seed", f.seed, "random seed (0 = default initial guess)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--field-out", f.field_out, "final field dump (.csv or CHQF)");
  app.add_option("--config", f.config, "key=value configuration file");
  app.add_option("--lambdas", f.lambdas, "comma-separated lambda values for sweep");
  app.add_option("--threads", f.threads, "sweep worker threads (0 = hardware)");
  app.add_option("--count", f.count, "verify: number of random samples");
  app.add_option("--eps", f.eps, "verify grad: finite-difference step");
  app.add_option("--gamma", cfg.gamma, "verify: Riesz order (default alpha)");
  app.add_option("--r", cfg.r_exp, "verify: exponent r");
  app.add_option("--t", cfg.t_exp, "verify hls: exponent t");
  app.add_option("--sigma", cfg.sigma, "verify: Gaussian bump width (default L/80)");
  app.add_option("--translations", f.translations, "verify: comma-separated translation distances");
  for (CLI::Option* opt : app.get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

template <class T, class U>
void override(const std::optional<T>& flag, U& target) {
  if (flag) target = static_cast<U>(*flag);
}

void validate_run(RunConfig& cfg, bool mode_set) {
  auto& m = cfg.setup.model;
  if (!mode_set) m.mode = cfg.command == Command::solve_nodal ? Mode::nodal : Mode::groundstate;
  if (cfg.command == Command::solve_nodal && m.mode != Mode::nodal) {
    throw ParameterError("solve-nodal requires mode=nodal, got mode=" + choquard::to_string(m.mode));
  }
  if (cfg.command == Command::compare_levels && m.mode != Mode::groundstate) {
    throw ParameterError("compare-levels requires mode=groundstate, got mode=" + choquard::to_string(m.mode));
  }
  if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) {
    throw ParameterError("tol must satisfy 0 < tol <= 1e-2, got " + format_real(cfg.tol));
  }
  if (cfg.max_iter < 1 || cfg.max_iter > 1000000) {
    throw ParameterError("max-iter must satisfy 1 <= max-iter <= 1e6, got " + std::to_string(cfg.max_iter));
  }
  if (cfg.threads < 0) throw ParameterError("threads must be >= 0");
  if (cfg.count < 1) throw ParameterError("count must be >= 1");
  make_grid(m.dim, cfg.setup.n, cfg.setup.box);
  if (cfg.command == Command::sweep) {
    if (cfg.lambdas.empty()) throw ParameterError("sweep: no lambda values");
    for (double l : cfg.lambdas) {
      ModelParams point = m;
      point.lambda = l;
      validate_params(point);
    }
  } else {
    validate_params(m);
  }
}

// ---------------------------------------------------------------- output

json params_json(const ModelParams& m) {
  return json{{"dim", m.dim},         {"s", m.s},
              {"alpha", m.alpha},     {"beta", m.beta},
              {"p", m.p},             {"q", m.q},
              {"lambda", m.lambda},   {"potential", m.potential.to_string()},
              {"mode", choquard::to_string(m.mode)}};
}

json grid_json(const GridSpec& g) {
  return json{{"dim", g.dim()}, {"n", g.n()}, {"box", g.box_length()}, {"spacing", g.spacing()}};
}

json settings_json(const RunConfig& cfg) {
  return json{{"tol", cfg.tol}, {"max_iter", cfg.max_iter}, {"seed", cfg.seed}};
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.precision(17);
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_history(const fs::path& path, const SolveReport& r, bool nodal) {
  auto out = open_output(path);
  out << "iter,energy,grad_norm,nehari_residual";
  if (nodal) out << ",tau,theta,plus_norm,minus_norm";
  out << '\n';
  for (std::size_t i = 0; i < r.energy_history.size(); ++i) {
    out << i << ',' << format_real(r.energy_history[i]) << ',' << format_real(r.grad_norm_history[i]) << ','
        << format_real(r.residual_history[i]);
    if (nodal) {
      out << ',' << format_real(r.tau_history[i]) << ',' << format_real(r.theta_history[i]) << ','
          << format_real(r.plus_norm_history[i]) << ',' << format_real(r.minus_norm_history[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_field(const std::string& path, const Field& u) {
  if (path.empty()) return;
  if (fs::path(path).extension() == ".csv") write_field_csv(path, u);
  else write_chqf(path, u);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (path.empty()) return path;
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json solve_json(const SolveReport& r, const Model& model, bool nodal) {
  json residuals{{"nehari", r.nehari_residual}};
  if (nodal) {
    residuals["plus"] = r.residual_plus;
    residuals["minus"] = r.residual_minus;
  }
  json out{{"converged", r.converged},
           {"iterations", r.iterations},
           {"final_energy", r.final_energy},
           {"grad_norm", r.grad_norm},
           {"residuals", residuals},
           {"norm2", model.norm2(r.field)},
           {"min_norm", r.min_norm}};
  if (nodal) out["min_part_norm"] = r.min_part_norm;
  return out;
}

Field initial_field(const RunConfig& cfg, const GridSpec& g, bool nodal) {
  if (nodal) {
    Field u = dipole_init(g);
    if (cfg.seed != 0) {
      RandomFieldGenerator gen(cfg.seed);
      u.axpy(0.3, gen.next(g));
    }
    return u;
  }
  if (cfg.seed == 0) return default_groundstate_init(g);
  RandomFieldGenerator gen(cfg.seed);
  return gen.next_positive(g);
}

struct SolveOutcome {
  ExitCode code = ExitCode::ok;
  std::string message;
  json report;
};

// One solve with its artifacts; `stem` names the files under out_dir.
SolveOutcome solve_once(const RunConfig& cfg, const ModelParams& params, const std::string& stem,
                        const std::string& field_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool nodal = params.mode == Mode::nodal;
  const GridSpec g = make_grid(params.dim, cfg.setup.n, cfg.setup.box);
  SolveOutcome res;
  res.report = json{{"command", to_string(cfg.command)},
                    {"status", "ok"},
                    {"params", params_json(params)},
                    {"grid", grid_json(g)},
                    {"settings", settings_json(cfg)}};
  const auto finish = [&](const SolveReport& r, const Model& model) {
    const json fields = solve_json(r, model, nodal);
    for (const auto& [k, v] : fields.items()) res.report[k] = v;
    res.report["history_csv"] = stem + "_history.csv";
    write_history(fs::path(cfg.out_dir) / (stem + "_history.csv"), r, nodal);
    write_field(field_path, r.field);
  };
  try {
    const Model model(params, g);
    const Field init = initial_field(cfg, g, nodal);
    try {
      const SolveReport r = nodal ? signchanging_solve(model, init, cfg.tol, cfg.max_iter)
                                  : groundstate_solve(model, init, cfg.tol, cfg.max_iter);
      finish(r, model);
    } catch (const SolveNonConvergence& e) {
      res.code = ExitCode::nonconv;
      res.message = e.what();
      finish(e.report(), model);
    }
  } catch (const NodalCollapse& e) {
    res.code = ExitCode::collapse;
    res.message = e.what();
  }
  res.report["status"] = status_name(res.code);
  if (!res.message.empty()) res.report["message"] = res.message;
  res.report["wall_time"] = seconds_since(t0);
  write_json(fs::path(cfg.out_dir) / (stem + ".json"), res.report);
  return res;
}

ExitCode run_solve(const RunConfig& cfg, std::ostream& log) {
  const std::string stem = to_string(cfg.command);
  const SolveOutcome res = solve_once(cfg, cfg.setup.model, stem, cfg.field_out);
  if (!res.message.empty()) log << "error=" << res.message << '\n';
  if (res.report.contains("final_energy")) {
    log << "iterations=" << res.report["iterations"].get<int>() << '\n'
        << "final_energy=" << format_real(res.report["final_energy"].get<double>()) << '\n'
        << "grad_norm=" << format_real(res.report["grad_norm"].get<double>()) << '\n';
  }
  log << "report=" << (fs::path(cfg.out_dir) / (stem + ".json")).string() << '\n';
  return res.code;
}

ExitCode run_compare(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g = make_grid(cfg.setup.model.dim, cfg.setup.n, cfg.setup.box);
  const Model model(cfg.setup.model, g);
  json doc{{"command", "compare-levels"},
           {"status", "ok"},
           {"params", params_json(cfg.setup.model)},
           {"grid", grid_json(g)},
           {"settings", settings_json(cfg)}};
  ExitCode code = ExitCode::ok;
  try {
    const LevelsReport lv = compare_levels(model, cfg.tol, cfg.max_iter);
    const Model limit = model.with_lambda(0.0);
    doc["iterations"] = lv.lambda_solve.iterations;
    doc["limit_iterations"] = lv.limit_solve.iterations;
    doc["final_energy"] = lv.m_lambda;
    doc["m_lambda"] = lv.m_lambda;
    doc["m_J"] = lv.m_J;
    doc["gap"] = lv.m_J - lv.m_lambda;
    doc["t_of_Q"] = lv.t_of_Q;
    doc["strict"] = lv.strict;
    doc["residuals"] = json{{"nehari", lv.lambda_solve.nehari_residual},
                            {"limit_nehari", lv.limit_solve.nehari_residual},
                            {"grad_norm", lv.lambda_solve.grad_norm},
                            {"limit_grad_norm", lv.limit_solve.grad_norm}};
    doc["history_csv"] = "compare-levels_history.csv";
    doc["limit_history_csv"] = "compare-levels_limit_history.csv";
    write_history(fs::path(cfg.out_dir) / "compare-levels_history.csv", lv.lambda_solve, false);
    write_history(fs::path(cfg.out_dir) / "compare-levels_limit_history.csv", lv.limit_solve, false);
    write_field(cfg.field_out, lv.lambda_solve.field);
    log << "m_lambda=" << format_real(lv.m_lambda) << '\n'
        << "m_J=" << format_real(lv.m_J) << '\n'
        << "t_of_Q=" << format_real(lv.t_of_Q) << '\n'
        << "strict=" << (lv.strict ? "true" : "false") << '\n';
  } catch (const SolveNonConvergence& e) {
    code = ExitCode::nonconv;
    doc["message"] = e.what();
    doc["iterations"] = e.report().iterations;
    doc["final_energy"] = e.report().final_energy;
    doc["residuals"] = json{{"nehari", e.report().nehari_residual}, {"grad_norm", e.report().grad_norm}};
    log << "error=" << e.what() << '\n';
  }
  doc["status"] = status_name(code);
  doc["wall_time"] = seconds_since(t0);
  write_json(fs::path(cfg.out_dir) / "compare-levels.json", doc);
  log << "report=" << (fs::path(cfg.out_dir) / "compare-levels.json").string() << '\n';
  return code;
}

ExitCode run_sweep(const RunConfig& cfg, std::ostream& log) {
  const std::size_t points = cfg.lambdas.size();
  std::vector<SolveOutcome> results(points);
  std::vector<std::string> stems(points);
  for (std::size_t i = 0; i < points; ++i) {
    std::ostringstream s;
    s << "sweep_" << i << "_lambda_" << std::setprecision(6) << cfg.lambdas[i];
    stems[i] = s.str();
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(points);
  const auto worker = [&] {
    for (std::size_t i = next++; i < points; i = next++) {
      try {
        ModelParams params = cfg.setup.model;
        params.lambda = cfg.lambdas[i];
        results[i] = solve_once(cfg, params, stems[i], with_suffix(cfg.field_out, "_" + std::to_string(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nthreads = std::min<std::size_t>(points, cfg.threads > 0 ? cfg.threads : hw);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExitCode worst = ExitCode::ok;
  auto summary = open_output(fs::path(cfg.out_dir) / "sweep_summary.csv");
  summary << "lambda,status,iterations,final_energy,grad_norm,nehari_residual,report\n";
  for (std::size_t i = 0; i < points; ++i) {
    const auto& r = results[i];
    if (worst == ExitCode::ok) worst = r.code;
    summary << format_real(cfg.lambdas[i]) << ',' << status_name(r.code) << ',';
    if (r.report.contains("final_energy")) {
      summary << r.report["iterations"].get<int>() << ',' << format_real(r.report["final_energy"].get<double>())
              << ',' << format_real(r.report["grad_norm"].get<double>()) << ','
              << format_real(r.report["residuals"]["nehari"].get<double>());
    } else {
      summary << ",,,";
    }
    summary << ',' << stems[i] << ".json\n";
    log << "lambda=" << format_real(cfg.lambdas[i]) << " status=" << status_name(r.code);
    if (r.report.contains("final_energy")) log << " final_energy=" << format_real(r.report["final_energy"].get<double>());
    log << '\n';
  }
  if (!summary) throw IoError("write to sweep_summary.csv failed");
  log << "summary=" << (fs::path(cfg.out_dir) / "sweep_summary.csv").string() << '\n';
  return worst;
}

// ---------------------------------------------------------------- verify

std::vector<double> default_translations(const RunConfig& cfg) {
  if (!cfg.translations.empty()) return cfg.translations;
  const double L = cfg.setup.box;
  return {L / 12.0, L / 6.0, L / 4.0, L / 3.0};
}

void write_curve(const fs::path& path, const DecayCurve& c) {
  auto out = open_output(path);
  out << "distance,defect\n";
  for (std::size_t i = 0; i < c.errors.size(); ++i) out << format_real(c.distances[i]) << ',' << format_real(c.errors[i]) << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ExitCode run_verify(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams& m = cfg.setup.model;
  const GridSpec g = make_grid(m.dim, cfg.setup.n, cfg.setup.box);
  const std::string stem = "verify_" + to_string(cfg.verb);
  json doc{{"command", "verify"},
           {"verb", to_string(cfg.verb)},
           {"status", "ok"},
           {"params", params_json(m)},
           {"grid", grid_json(g)},
           {"settings", settings_json(cfg)},
           {"iterations", 0},
           {"final_energy", nullptr}};

  const double sigma = cfg.sigma.value_or(cfg.setup.box / 80.0);
  const double gamma = cfg.gamma.value_or(m.alpha);
  const auto bumps = [&] {
    return std::array<Field, 3>{gaussian_bump(g, sigma), gaussian_bump(g, sigma, 0.8),
                                gaussian_bump(g, sigma, 1.0, {sigma, 0.0, 0.0})};
  };
  const auto emit_curve = [&](const DecayCurve& c) {
    const fs::path csv = fs::path(cfg.out_dir) / (stem + ".csv");
    write_curve(csv, c);
    bool decreasing = c.errors.back() <= c.errors.front();
    doc["sigma"] = sigma;
    doc["distances"] = c.distances;
    doc["errors"] = c.errors;
    doc["magnitude"] = c.magnitude;
    doc["terminal_ratio"] = c.terminal_ratio;
    doc["decreasing"] = decreasing;
    doc["residuals"] = json{{"terminal_ratio", c.terminal_ratio}};
    doc["curve_csv"] = stem + ".csv";
    log << "terminal_ratio=" << format_real(c.terminal_ratio) << '\n';
  };

  switch (cfg.verb) {
    case VerifyVerb::bl_local: {
      const auto [u, w, h] = bumps();
      emit_curve(brezis_lieb_local(w, u, default_translations(cfg), m.q, cfg.r_exp.value_or(2.0)));
      break;
    }
    case VerifyVerb::bl_nonlocal: {
      const auto [u, w, h] = bumps();
      emit_curve(brezis_lieb_nonlocal(u, w, default_translations(cfg), gamma, cfg.r_exp.value_or(m.p)));
      break;
    }
    case VerifyVerb::bl_pairing: {
      const auto [u, w, h] = bumps();
      emit_curve(brezis_lieb_pairing(u, w, h, default_translations(cfg), gamma, cfg.r_exp.value_or(m.p)));
      break;
    }
    case VerifyVerb::energy_split: {
      const auto [u, w, h] = bumps();
      emit_curve(energy_splitting(u, w, default_translations(cfg), Model(m, g)));
      break;
    }
    case VerifyVerb::hls: {
      const double conj = 2.0 / (1.0 + gamma / m.dim);
      const double r = cfg.r_exp.value_or(conj);
      const double t = cfg.t_exp.value_or(1.0 / (1.0 + gamma / m.dim - 1.0 / r));
      const HlsSweep sw = hls_sweep(g, gamma, r, t, cfg.count, cfg.seed);
      auto out = open_output(fs::path(cfg.out_dir) / (stem + ".csv"));
      out << "sample,ratio\n";
      for (std::size_t i = 0; i < sw.ratios.size(); ++i) out << i << ',' << format_real(sw.ratios[i]) << '\n';
      if (!out) throw IoError("write to '" + stem + ".csv' failed");
      doc["gamma"] = gamma;
      doc["r"] = r;
      doc["t"] = t;
      doc["ratios"] = sw.ratios;
      doc["max_ratio"] = sw.max_ratio;
      doc["residuals"] = json{{"max_ratio", sw.max_ratio}};
      doc["ratios_csv"] = stem + ".csv";
      log << "max_ratio=" << format_real(sw.max_ratio) << '\n';
      break;
    }
    case VerifyVerb::grad: {
      const Model model(m, g);
      const FdSuite fd = gradient_fd_suite(model, cfg.count, cfg.seed, cfg.eps);
      auto out = open_output(fs::path(cfg.out_dir) / (stem + ".csv"));
      out << "sample,rel_error\n";
      for (std::size_t i = 0; i < fd.rel_errors.size(); ++i) out << i << ',' << format_real(fd.rel_errors[i]) << '\n';
      if (!out) throw IoError("write to '" + stem + ".csv' failed");
      doc["eps"] = cfg.eps;
      doc["rel_errors"] = fd.rel_errors;
      doc["max_rel_error"] = fd.max_rel_error;
      doc["residuals"] = json{{"max_rel_error", fd.max_rel_error}};
      log << "max_rel_error=" << format_real(fd.max_rel_error) << '\n';
      break;
    }
  }
  doc["wall_time"] = seconds_since(t0);
  write_json(fs::path(cfg.out_dir) / (stem + ".json"), doc);
  log << "report=" << (fs::path(cfg.out_dir) / (stem + ".json")).string() << '\n';
  return ExitCode::ok;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  FlagValues f;
  CLI::App app{"Nonlocal Choquard equation solver and diagnostics", "choquard"};
  app.require_subcommand(1);
  add_flags(app, f, cfg);
  app.fallthrough();

  const std::pair<Command, const char*> commands[] = {
      {Command::solve_ground, "groundstate by projected descent on the Nehari manifold"},
      {Command::solve_nodal, "least-energy sign-changing solution on the nodal set"},
      {Command::compare_levels, "compare the lambda level with the lambda = 0 limit level"},
      {Command::sweep, "solve over a list of lambda values"},
      {Command::verify, "diagnostic suites"}};
  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    sub->fallthrough();
    subs.emplace_back(cmd, sub);
  }
  CLI::App* verify = subs.back().second;
  verify->require_subcommand(1);
  std::vector<std::pair<VerifyVerb, CLI::App*>> verbs;
  for (VerifyVerb v : {VerifyVerb::bl_local, VerifyVerb::bl_nonlocal, VerifyVerb::bl_pairing,
                       VerifyVerb::energy_split, VerifyVerb::hls, VerifyVerb::grad}) {
    CLI::App* sub = verify->add_subcommand(to_string(v));
    sub->fallthrough();
    verbs.emplace_back(v, sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw ParameterError(std::string("command line: ") + e.what());
  }
  for (const auto& [cmd, sub] : subs)
    if (sub->parsed()) cfg.command = cmd;
  for (const auto& [v, sub] : verbs)
    if (sub->parsed()) cfg.verb = v;

  bool mode_set = false;
  if (f.config) apply_config_file(*f.config, cfg, mode_set);

  auto& m = cfg.setup.model;
  override(f.dim, m.dim);
  override(f.n, cfg.setup.n);
  override(f.box, cfg.setup.box);
  override(f.s, m.s);
  override(f.alpha, m.alpha);
  override(f.beta, m.beta);
  override(f.p, m.p);
  override(f.q, m.q);
  override(f.lambda, m.lambda);
  override(f.tol, cfg.tol);
  override(f.max_iter, cfg.max_iter);
  override(f.seed, cfg.seed);
  override(f.threads, cfg.threads);
  override(f.count, cfg.count);
  override(f.eps, cfg.eps);
  override(f.out, cfg.out_dir);
  override(f.field_out, cfg.field_out);
  if (f.potential) m.potential = PotentialSpec::parse(*f.potential);
  if (f.mode) {
    m.mode = parse_mode(*f.mode);
    mode_set = true;
  }
  if (f.lambdas) cfg.lambdas = parse_real_list("lambdas", *f.lambdas);
  if (f.translations) cfg.translations = parse_real_list("translations", *f.translations);

  validate_run(cfg, mode_set);
  return cfg;
}

ExitCode run(const RunConfig& config, std::ostream& log) {
  ExitCode code = ExitCode::ok;
  try {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec || !fs::is_directory(config.out_dir)) {
      throw IoError("cannot create output directory '" + config.out_dir + "'");
    }
    switch (config.command) {
      case Command::solve_ground:
      case Command::solve_nodal: code = run_solve(config, log); break;
      case Command::compare_levels: code = run_compare(config, log); break;
      case Command::sweep: code = run_sweep(config, log); break;
      case Command::verify: code = run_verify(config, log); break;
    }
  } catch (const IoError& e) {
    log << "error=" << e.what() << '\n';
    code = ExitCode::io;
  } catch (const NodalCollapse& e) {
    log << "error=" << e.what() << '\n';
    code = ExitCode::collapse;
  } catch (const NonConvergence& e) {
    log << "error=" << e.what() << '\n';
    code = ExitCode::nonconv;
  } catch (const ParameterError& e) {
    log << "error=" << e.what() << '\n';
    code = ExitCode::validation;
  } catch (const PotentialViolation& e) {
    log << "error=" << e.what() << '\n';
    code = ExitCode::validation;
  } catch (const UnsupportedRegime& e) {
    log << "error=" << e.what() << '\n';
    code = ExitCode::validation;
  } catch (const Error& e) {
    // Remaining numerical failures (degenerate iterate, no root, ...).
    log << "error=" << e.what() << '\n';
    code = ExitCode::nonconv;
  }
  log << "status=" << status_name(code) << '\n';
  return code;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    out << "status=io\n";
    return static_cast<int>(ExitCode::io);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    out << "status=validation\n";
    return static_cast<int>(ExitCode::validation);
  }
  return static_cast<int>(run(cfg, out));
}

}  // namespace choquard::cli
