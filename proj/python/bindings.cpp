#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dmpfem/error.hpp"
#include "dmpfem/run.hpp"

namespace py = pybind11;
using namespace dmpfem;

namespace {

py::dict report_dict(const DmpReport& r) {
  py::dict d;
  d["min_value"] = r.min_value;
  d["min_location"] = py::make_tuple(r.min_location.x(), r.min_location.y());
  d["max_value"] = r.max_value;
  d["max_location"] = py::make_tuple(r.max_location.x(), r.max_location.y());
  d["boundary_min"] = r.boundary_min;
  d["boundary_max"] = r.boundary_max;
  d["interior_min"] = r.interior_min;
  d["interior_max"] = r.interior_max;
  d["has_interior"] = r.has_interior;
  d["negative_fraction"] = r.negative_fraction;
  d["samples"] = r.samples;
  d["eval_density"] = r.eval_density;
  d["nonneg"] = to_string(r.verdicts.nonneg);
  d["mp_diffusion"] = to_string(r.verdicts.mp_diffusion);
  d["mp_decay"] = to_string(r.verdicts.mp_decay);
  return d;
}

/// Solved field plus its audit, without touching the file system.
struct PySolution {
  FieldSolution field;
  SolveReport solve;
  DmpReport report;
  std::optional<ErrorNorms> errors;
  int voigt_fallbacks = 0;
};

PySolution solve_in_memory(const RunConfig& config) {
  const ProblemSpec problem = resolve_problem(config);
  auto mesh = std::make_shared<const Mesh>(resolve_mesh(config, problem));
  SolveResult res = solve_problem(problem, mesh, resolve_discretization(config));
  PySolution out;
  out.report = scan_extrema(res.solution, config.density);
  out.report.verdicts = audit_dmp(out.report, problem);
  if (problem.analytic) out.errors = error_norms(res.solution, problem.analytic, config.density);
  out.field = std::move(res.solution);
  out.solve = res.report;
  out.voigt_fallbacks = res.voigt_fallbacks;
  return out;
}

Eigen::MatrixXd node_coordinates(const FieldSolution& sol) {
  const auto& xs = sol.dofs->node_coords;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral/hp Galerkin and least-squares solver with maximum-principle audits";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
      if (e.kind() == ErrorKind::InvalidArgument) PyErr_SetString(PyExc_ValueError, msg.c_str());
      else py::set_error(error_type, msg.c_str());
    }
  });

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("problem", &RunConfig::problem)
      .def_readwrite("problem_file", &RunConfig::problem_file)
      .def_readwrite("k1", &RunConfig::k1)
      .def_readwrite("k2", &RunConfig::k2)
      .def_readwrite("lepotier_eps", &RunConfig::lepotier_eps)
      .def_readwrite("formulation", &RunConfig::formulation)
      .def_readwrite("p", &RunConfig::order)
      .def_readwrite("ngp", &RunConfig::ngp)
      .def_readwrite("kernel", &RunConfig::kernel)
      .def_readwrite("solver", &RunConfig::solver)
      .def_readwrite("ordering", &RunConfig::ordering)
      .def_readwrite("nx", &RunConfig::nx)
      .def_readwrite("ny", &RunConfig::ny)
      .def_readwrite("ne", &RunConfig::ne)
      .def_readwrite("hole_n", &RunConfig::hole_n)
      .def_readwrite("jitter_amplitude", &RunConfig::jitter_amplitude)
      .def_readwrite("jitter_seed", &RunConfig::jitter_seed)
      .def_readwrite("density", &RunConfig::density)
      .def_readwrite("sweep_mode", &RunConfig::sweep_mode)
      .def_readwrite("levels", &RunConfig::levels)
      .def_readwrite("h_order", &RunConfig::h_order)
      .def_readwrite("jobs", &RunConfig::jobs)
      .def_readwrite("sweep_formulations", &RunConfig::sweep_formulations)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("write_vtk", &RunConfig::write_vtk)
      .def_readwrite("include_timing", &RunConfig::include_timing)
      .def("to_json", &run_config_json)
      .def_static("from_json", &run_config_from_json, py::arg("text"))
      .def(py::self == py::self)
      .def("__repr__", [](const RunConfig& c) {
        return "RunConfig(problem='" + c.problem + "', formulation='" + c.formulation + "', p=" +
               std::to_string(c.order) + ")";
      });

  py::class_<PySolution>(m, "Solution")
      .def_property_readonly("coordinates", [](const PySolution& s) { return node_coordinates(s.field); },
                             "node coordinates, one row per node (y = 0 in 1D)")
      .def_property_readonly("concentration", [](const PySolution& s) { return s.field.concentration; })
      .def_property_readonly("flux", [](const PySolution& s) { return s.field.flux; },
                             "nodal flux (nodes x dim); empty for single-field solutions")
      .def_property_readonly("p", [](const PySolution& s) { return s.field.order; })
      .def_property_readonly("formulation", [](const PySolution& s) { return to_string(s.field.formulation); })
      .def_property_readonly("elements", [](const PySolution& s) { return s.field.mesh->num_elements(); })
      .def_property_readonly("report", [](const PySolution& s) { return report_dict(s.report); })
      .def_property_readonly("errors", [](const PySolution& s) -> py::object {
        if (!s.errors) return py::none();
        py::dict d;
        d["l2"] = s.errors->l2;
        d["linf"] = s.errors->linf;
        return std::move(d);
      })
      .def_property_readonly("solver", [](const PySolution& s) {
        py::dict d;
        d["method"] = s.solve.method;
        d["relative_residual"] = s.solve.relative_residual;
        d["iterations"] = s.solve.iterations;
        d["refinement_steps"] = s.solve.refinement_steps;
        d["wall_time"] = s.solve.wall_time;
        return d;
      })
      .def_readonly("voigt_fallbacks", &PySolution::voigt_fallbacks)
      .def(
          "evaluate",
          [](const PySolution& s, int element, double xi, double eta) {
            if (element < 0 || element >= s.field.mesh->num_elements()) throw py::index_error("element out of range");
            return evaluate(s.field, element, xi, eta);
          },
          py::arg("element"), py::arg("xi"), py::arg("eta") = 0.0,
          "concentration at master coordinates of one element")
      .def(
          "scan",
          [](const PySolution& s, int density) { return report_dict(scan_extrema(s.field, density)); },
          py::arg("density") = 16, "extrema over the density x density GLL grid plus nodes (no verdicts)");

  m.def("list_problems", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& id : canonical_problem_ids()) out.emplace_back(id, canonical_problem(id).summary);
    return out;
  });

  m.def("solve", &solve_in_memory, py::arg("config"), "solve and audit in memory");

  m.def(
      "sweep",
      [](const RunConfig& config) {
        const ProblemSpec problem = resolve_problem(config);
        const Mesh base = resolve_mesh(config, problem);
        SweepOptions opt;
        opt.mode = sweep_mode_from_string(config.sweep_mode);
        opt.levels = parse_levels(config.levels);
        opt.h_order = config.h_order;
        opt.density = config.density;
        opt.jobs = config.jobs;
        opt.discretization = resolve_discretization(config);
        std::vector<std::string> names = config.sweep_formulations;
        if (names.empty()) names.push_back(config.formulation);
        py::list rows;
        for (const auto& name : names) {
          SweepTable t;
          {
            py::gil_scoped_release release;
            t = sweep(problem, base, formulation_from_string(name), opt);
          }
          if (t.partial) throw Error(ErrorKind::Computation, "sweep stopped early: " + t.failure);
          for (const auto& r : t.rows) {
            py::dict d;
            d["level"] = r.level;
            d["formulation"] = to_string(r.formulation);
            d["p"] = r.order;
            d["elements"] = r.elements;
            d["min_concentration"] = r.min_concentration;
            d["min_location"] = py::make_tuple(r.min_location.x(), r.min_location.y());
            rows.append(d);
          }
        }
        return rows;
      },
      py::arg("config"), "p or h refinement sweep; one dict per row");

  m.def(
      "run_solve",
      [](const RunConfig& config) {
        const SolveOutcome s = run_solve(config);
        return py::make_tuple(s.output_dir, s.files);
      },
      py::arg("config"), "solve, audit and write the run artifacts; returns (directory, files)");

  m.def(
      "run_sweep",
      [](const RunConfig& config) {
        const SweepOutcome s = run_sweep(config);
        return py::make_tuple(s.output_dir, s.files);
      },
      py::arg("config"));

  m.def(
      "audit",
      [](const std::string& path, int density) { return report_dict(audit_dump(path, density).report); },
      py::arg("path"), py::arg("density") = 0, "re-audit a solution.json dump");

  m.def("verify", [] {
    std::ostringstream out;
    const bool ok = run_verification(out);
    return py::make_tuple(ok, out.str());
  });
}
