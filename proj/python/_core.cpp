#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "choquard/cli.hpp"
#include "choquard/errors.hpp"
#include "choquard/nodal.hpp"
#include "choquard/random_fields.hpp"
#include "choquard/spectral.hpp"
#include "choquard/verify.hpp"

namespace py = pybind11;
using namespace choquard;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const GridSpec& g, const Array& a) {
  const auto expect = static_cast<py::ssize_t>(g.n());
  if (a.ndim() != g.dim()) {
    throw ParameterError("array has " + std::to_string(a.ndim()) + " axes, grid has " + std::to_string(g.dim()));
  }
  for (py::ssize_t k = 0; k < a.ndim(); ++k) {
    if (a.shape(k) != expect) throw ParameterError("array shape does not match the grid (n = " + std::to_string(g.n()) + ")");
  }
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Field& u) {
  std::vector<py::ssize_t> shape(u.grid().dim(), u.grid().n());
  Array out(shape);
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

ModelParams make_params(int dim, double s, double alpha, double beta, double p, double q, double lam,
                        const std::string& potential, const std::string& mode) {
  ModelParams m;
  m.dim = dim;
  m.s = s;
  m.alpha = alpha;
  m.beta = beta;
  m.p = p;
  m.q = q;
  m.lambda = lam;
  m.potential = PotentialSpec::parse(potential);
  m.mode = parse_mode(mode);
  return m;
}

py::dict solve_dict(const SolveReport& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["final_energy"] = r.final_energy;
  d["grad_norm"] = r.grad_norm;
  d["nehari_residual"] = r.nehari_residual;
  d["min_norm"] = r.min_norm;
  d["energy_history"] = r.energy_history;
  d["grad_norm_history"] = r.grad_norm_history;
  d["residual_history"] = r.residual_history;
  d["field"] = to_array(r.field);
  if (!r.tau_history.empty()) {
    d["tau_history"] = r.tau_history;
    d["theta_history"] = r.theta_history;
    d["plus_norm_history"] = r.plus_norm_history;
    d["minus_norm_history"] = r.minus_norm_history;
    d["residual_plus"] = r.residual_plus;
    d["residual_minus"] = r.residual_minus;
    d["min_part_norm"] = r.min_part_norm;
  }
  return d;
}

py::dict curve_dict(const DecayCurve& c) {
  py::dict d;
  d["distances"] = c.distances;
  d["errors"] = c.errors;
  d["magnitude"] = c.magnitude;
  d["terminal_ratio"] = c.terminal_ratio;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlocal Choquard equation: spectral operators, Nehari and nodal solvers, diagnostics";

  static py::exception<Error> base(m, "ChoquardError", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<PotentialViolation>(m, "PotentialViolation", base.ptr());
  py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
  py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<NodalCollapse>(m, "NodalCollapse", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<GridSpec>(m, "Grid")
      .def(py::init(&make_grid), py::arg("dim"), py::arg("n"), py::arg("box"))
      .def_property_readonly("dim", &GridSpec::dim)
      .def_property_readonly("n", &GridSpec::n)
      .def_property_readonly("box", &GridSpec::box_length)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("cell_volume", &GridSpec::cell_volume)
      .def("coordinates",
           [](const GridSpec& g) {
             std::vector<double> x(g.n());
             for (int j = 0; j < g.n(); ++j) x[j] = g.coordinate(j);
             return x;
           })
      .def("__repr__", [](const GridSpec& g) {
        std::ostringstream s;
        s << "Grid(dim=" << g.dim() << ", n=" << g.n() << ", box=" << g.box_length() << ")";
        return s.str();
      });

  py::class_<ModelParams>(m, "Params")
      .def(py::init(&make_params), py::arg("dim") = 3, py::arg("s") = 0.5, py::arg("alpha") = 2.0,
           py::arg("beta") = 2.0, py::arg("p") = 2.2, py::arg("q") = 1.8, py::arg("lam") = 0.5,
           py::arg("potential") = "const:1", py::arg("mode") = "groundstate")
      .def_readwrite("dim", &ModelParams::dim)
      .def_readwrite("s", &ModelParams::s)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("p", &ModelParams::p)
      .def_readwrite("q", &ModelParams::q)
      .def_readwrite("lam", &ModelParams::lambda)
      .def_property(
          "potential", [](const ModelParams& p) { return p.potential.to_string(); },
          [](ModelParams& p, const std::string& text) { p.potential = PotentialSpec::parse(text); })
      .def_property(
          "mode", [](const ModelParams& p) { return to_string(p.mode); },
          [](ModelParams& p, const std::string& text) { p.mode = parse_mode(text); });

  m.def("validate_params", [](const ModelParams& p) { return validate_params(p).warnings; },
        "Raises ParameterError naming every violated inequality; returns warnings.");
  m.def("exponent_window", [](int dim, double s, double order) {
    const auto w = exponent_window(dim, s, order);
    return py::make_tuple(w.lower, w.upper);
  });

  py::class_<Model>(m, "Model")
      .def(py::init<ModelParams, GridSpec>(), py::arg("params"), py::arg("grid"))
      .def_property_readonly("grid", &Model::grid)
      .def_property_readonly("params", &Model::params)
      .def("with_lambda", &Model::with_lambda)
      .def("norm2", [](const Model& md, const Array& u) { return md.norm2(to_field(md.grid(), u)); })
      .def("energy",
           [](const Model& md, const Array& u) {
             const EnergyBreakdown e = energy(to_field(md.grid(), u), md);
             py::dict d;
             d["seminorm_half"] = e.seminorm_half;
             d["potential_half"] = e.potential_half;
             d["alpha_term"] = e.alpha_term;
             d["beta_term"] = e.beta_term;
             d["total"] = e.total;
             return d;
           })
      .def("functional_J", [](const Model& md, const Array& u) { return functional_J(to_field(md.grid(), u), md); })
      .def("first_variation_pair",
           [](const Model& md, const Array& u, const Array& v) {
             return first_variation_pair(to_field(md.grid(), u), to_field(md.grid(), v), md);
           })
      .def("nehari_residual", [](const Model& md, const Array& u) { return nehari_residual(to_field(md.grid(), u), md); })
      .def("project_nehari",
           [](const Model& md, const Array& u) {
             const NehariProjection pr = project_nehari(to_field(md.grid(), u), md);
             return py::make_tuple(pr.t, to_array(pr.projected), pr.residual);
           })
      .def("project_nodal", [](const Model& md, const Array& u) {
        const NodalProjection pr = project_nodal(to_field(md.grid(), u), md);
        py::dict d;
        d["field"] = to_array(pr.projected);
        d["tau"] = pr.tau0;
        d["theta"] = pr.theta0;
        d["residual_plus"] = pr.residual_plus;
        d["residual_minus"] = pr.residual_minus;
        d["start_spread"] = pr.start_spread;
        return d;
      });

  m.def(
      "groundstate_solve",
      [](const Model& md, std::optional<Array> init, double tol, int max_iter) {
        const Field u0 = init ? to_field(md.grid(), *init) : default_groundstate_init(md.grid());
        py::gil_scoped_release release;
        SolveReport r = groundstate_solve(md, u0, tol, max_iter);
        py::gil_scoped_acquire acquire;
        return solve_dict(r);
      },
      py::arg("model"), py::arg("init") = py::none(), py::arg("tol") = 1e-6, py::arg("max_iter") = 500);
  m.def(
      "signchanging_solve",
      [](const Model& md, std::optional<Array> init, double tol, int max_iter) {
        const Field u0 = init ? to_field(md.grid(), *init) : dipole_init(md.grid());
        py::gil_scoped_release release;
        SolveReport r = signchanging_solve(md, u0, tol, max_iter);
        py::gil_scoped_acquire acquire;
        return solve_dict(r);
      },
      py::arg("model"), py::arg("init") = py::none(), py::arg("tol") = 1e-6, py::arg("max_iter") = 500);
  m.def(
      "compare_levels",
      [](const Model& md, double tol, int max_iter) {
        const LevelsReport lv = compare_levels(md, tol, max_iter);
        py::dict d;
        d["m_lambda"] = lv.m_lambda;
        d["m_J"] = lv.m_J;
        d["t_of_Q"] = lv.t_of_Q;
        d["strict"] = lv.strict;
        return d;
      },
      py::arg("model"), py::arg("tol") = 1e-6, py::arg("max_iter") = 500);

  m.def("fractional_laplacian", [](const GridSpec& g, const Array& u, double s) {
    return to_array(fractional_laplacian(to_field(g, u), s));
  });
  m.def("riesz_convolve", [](const GridSpec& g, const Array& u, double gamma) {
    return to_array(riesz_convolve(to_field(g, u), gamma));
  });
  m.def("gaussian_bump", [](const GridSpec& g, double sigma, double amplitude, std::array<double, 3> centre) {
    return to_array(gaussian_bump(g, sigma, amplitude, centre));
  }, py::arg("grid"), py::arg("sigma"), py::arg("amplitude") = 1.0, py::arg("centre") = std::array<double, 3>{0, 0, 0});
  m.def("random_field", [](const GridSpec& g, std::uint64_t seed, bool positive) {
    RandomFieldGenerator gen(seed);
    return to_array(positive ? gen.next_positive(g) : gen.next(g));
  }, py::arg("grid"), py::arg("seed"), py::arg("positive") = false);
  m.def("cross_gagliardo", [](const GridSpec& g, const Array& u, double s) {
    return cross_gagliardo(split_parts(to_field(g, u)), s);
  });

  m.def("translate", [](const GridSpec& g, const Array& u, double z) { return to_array(translate(to_field(g, u), z)); });
  m.def("brezis_lieb_local", [](const GridSpec& g, const Array& w, const Array& u, const std::vector<double>& zs,
                                double q, double r) {
    return curve_dict(brezis_lieb_local(to_field(g, w), to_field(g, u), zs, q, r));
  });
  m.def("brezis_lieb_nonlocal", [](const GridSpec& g, const Array& u, const Array& w, const std::vector<double>& zs,
                                   double gamma, double r) {
    return curve_dict(brezis_lieb_nonlocal(to_field(g, u), to_field(g, w), zs, gamma, r));
  });
  m.def("brezis_lieb_pairing", [](const GridSpec& g, const Array& u, const Array& w, const Array& h,
                                  const std::vector<double>& zs, double gamma, double r) {
    return curve_dict(brezis_lieb_pairing(to_field(g, u), to_field(g, w), to_field(g, h), zs, gamma, r));
  });
  m.def("energy_splitting", [](const Model& md, const Array& u, const Array& w, const std::vector<double>& zs) {
    return curve_dict(energy_splitting(to_field(md.grid(), u), to_field(md.grid(), w), zs, md));
  });
  m.def("hls_sweep", [](const GridSpec& g, double gamma, double r, double t, int count, std::uint64_t seed) {
    const HlsSweep sw = hls_sweep(g, gamma, r, t, count, seed);
    return py::make_tuple(sw.max_ratio, sw.ratios);
  });
  m.def("gradient_fd_suite", [](const Model& md, int count, std::uint64_t seed, double eps) {
    return gradient_fd_suite(md, count, seed, eps).max_rel_error;
  });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::main_entry(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
