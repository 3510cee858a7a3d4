#include "dmpfem/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmpfem/error.hpp"

namespace dmpfem {

using nlohmann::json;

namespace {

json config_to_json(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["problem_file"] = c.problem_file;
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["lepotier_eps"] = c.lepotier_eps;
  j["formulation"] = c.formulation;
  j["p"] = c.order;
  j["ngp"] = c.ngp;
  j["kernel"] = c.kernel;
  j["solver"] = c.solver;
  j["ordering"] = c.ordering;
  j["mesh"] = {{"nx", c.nx}, {"ny", c.ny}, {"ne", c.ne}, {"hole_n", c.hole_n},
               {"jitter_amplitude", c.jitter_amplitude}, {"jitter_seed", c.jitter_seed}};
  j["density"] = c.density;
  j["sweep"] = {{"mode", c.sweep_mode}, {"levels", c.levels}, {"h_order", c.h_order}, {"jobs", c.jobs},
                {"formulations", c.sweep_formulations}};
  j["output_dir"] = c.output_dir;
  j["write_vtk"] = c.write_vtk;
  j["include_timing"] = c.include_timing;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("problem", c.problem);
  get("problem_file", c.problem_file);
  get("k1", c.k1);
  get("k2", c.k2);
  get("lepotier_eps", c.lepotier_eps);
  get("formulation", c.formulation);
  get("p", c.order);
  get("ngp", c.ngp);
  get("kernel", c.kernel);
  get("solver", c.solver);
  get("ordering", c.ordering);
  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    if (m.contains("nx")) m.at("nx").get_to(c.nx);
    if (m.contains("ny")) m.at("ny").get_to(c.ny);
    if (m.contains("ne")) m.at("ne").get_to(c.ne);
    if (m.contains("hole_n")) m.at("hole_n").get_to(c.hole_n);
    if (m.contains("jitter_amplitude")) m.at("jitter_amplitude").get_to(c.jitter_amplitude);
    if (m.contains("jitter_seed")) m.at("jitter_seed").get_to(c.jitter_seed);
  }
  get("density", c.density);
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.contains("mode")) s.at("mode").get_to(c.sweep_mode);
    if (s.contains("levels")) s.at("levels").get_to(c.levels);
    if (s.contains("h_order")) s.at("h_order").get_to(c.h_order);
    if (s.contains("jobs")) s.at("jobs").get_to(c.jobs);
    if (s.contains("formulations")) s.at("formulations").get_to(c.sweep_formulations);
  }
  get("output_dir", c.output_dir);
  get("write_vtk", c.write_vtk);
  get("include_timing", c.include_timing);
  return c;
}

json descriptor_json(const Mesh& mesh) {
  const MeshDescriptor& d = mesh.descriptor;
  return {{"kind", to_string(d.kind)},
          {"bounds", {d.x0, d.y0, d.x1, d.y1}},
          {"nx", d.nx},
          {"ny", d.ny},
          {"hole_n", d.hole_n},
          {"jitter_amplitude", d.jitter_amplitude},
          {"jitter_seed", d.jitter_seed},
          {"elements", mesh.num_elements()},
          {"vertices", mesh.num_vertices()}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& ex) {
    fail(ErrorKind::Io, std::string(what) + ": " + ex.what());
  }
}

}  // namespace

std::string run_config_json(const RunConfig& config) { return config_to_json(config).dump(2) + "\n"; }

RunConfig run_config_from_json(const std::string& text) {
  const json j = parse_json(text, "run config");
  try {
    return config_from_json(j.contains("config") ? j.at("config") : j);
  } catch (const json::exception& ex) {
    fail(ErrorKind::InvalidArgument, std::string("run config: ") + ex.what());
  }
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(read_text(path)); }

ProblemSpec resolve_problem(const RunConfig& c) {
  if (!c.problem_file.empty()) return load_problem_file(c.problem_file);
  ProblemParams params;
  params.k1 = c.k1;
  params.k2 = c.k2;
  params.lepotier_eps = c.lepotier_eps;
  return canonical_problem(c.problem, params);
}

Mesh resolve_mesh(const RunConfig& c, const ProblemSpec& problem) {
  MeshDescriptor d = problem.mesh;
  switch (d.kind) {
    case MeshKind::Interval:
      if (c.ne > 0) d.nx = c.ne;
      break;
    case MeshKind::Rectangle:
      if (c.nx > 0) d.nx = c.nx;
      if (c.ny > 0) d.ny = c.ny;
      break;
    case MeshKind::Hole:
      if (c.hole_n > 0) d.hole_n = c.hole_n;
      break;
    case MeshKind::Imported:
      break;
  }
  if (c.jitter_amplitude > 0.0) {
    d.jitter_amplitude = c.jitter_amplitude;
    d.jitter_seed = c.jitter_seed;
  }
  return build_mesh(d);
}

DiscretizationOptions resolve_discretization(const RunConfig& c) {
  DiscretizationOptions d;
  d.formulation = formulation_from_string(c.formulation);
  d.order = c.order;
  if (c.order < 1 || c.order > 30) fail(ErrorKind::InvalidArgument, "p must be in [1, 30]");
  d.ngp = c.ngp;
  if (c.ngp < 0 || c.ngp > kMaxGaussPoints) fail(ErrorKind::InvalidArgument, "ngp must be in [0, 32]");
  if (c.kernel == "variational") d.kernel = ElementKernel::Variational;
  else if (c.kernel == "voigt") d.kernel = ElementKernel::Voigt;
  else fail(ErrorKind::InvalidArgument, "kernel must be 'variational' or 'voigt'");
  if (c.solver == "auto") d.solver.method = SolverMethod::Auto;
  else if (c.solver == "direct") d.solver.method = SolverMethod::Direct;
  else if (c.solver == "cg") d.solver.method = SolverMethod::Iterative;
  else fail(ErrorKind::InvalidArgument, "solver must be auto, direct or cg");
  d.solver.ordering = ordering_from_string(c.ordering);
  return d;
}

std::string default_output_dir(const RunConfig& c, bool sweep) {
  const char* env = std::getenv("DMPFEM_OUT");
  const std::filesystem::path root = (env && *env) ? env : "out";
  const std::string name = c.problem_file.empty() ? c.problem
                                                  : std::filesystem::path(c.problem_file).stem().string();
  const std::string leaf = sweep ? name + "-sweep-" + c.sweep_mode
                                 : name + "-" + to_string(formulation_from_string(c.formulation)) + "-p" +
                                       std::to_string(c.order);
  return (root / leaf).string();
}

// ---------------------------------------------------------------------------
// Solution dumps

std::string solution_dump(const RunConfig& config, const FieldSolution& sol) {
  std::ostringstream mesh_text;
  write_mesh(*sol.mesh, mesh_text);
  json j;
  j["config"] = config_to_json(config);
  j["p"] = sol.order;
  j["formulation"] = to_string(sol.formulation);
  j["mesh"] = mesh_text.str();
  j["concentration"] = std::vector<double>(sol.concentration.data(), sol.concentration.data() + sol.concentration.size());
  json flux = json::array();
  for (Eigen::Index a = 0; a < sol.flux.cols(); ++a) {
    const Eigen::VectorXd col = sol.flux.col(a);
    flux.push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  j["flux"] = flux;
  return j.dump() + "\n";
}

FieldSolution load_solution_dump(const std::string& text, RunConfig* config) {
  const json j = parse_json(text, "solution dump");
  try {
    if (config) *config = config_from_json(j.at("config"));
    std::istringstream mesh_in(j.at("mesh").get<std::string>());
    auto mesh = std::make_shared<const Mesh>(read_mesh(mesh_in));
    FieldSolution sol;
    sol.order = j.at("p").get<int>();
    sol.formulation = formulation_from_string(j.at("formulation").get<std::string>());
    sol.dofs = std::make_shared<const DofMap>(build_dof_map(*mesh, sol.order));
    sol.mesh = mesh;
    const auto c = j.at("concentration").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != sol.dofs->num_nodes) {
      fail(ErrorKind::InvalidArgument, "solution dump: concentration size does not match the mesh");
    }
    sol.concentration = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    const auto& flux = j.at("flux");
    if (!flux.empty()) {
      sol.flux.resize(sol.dofs->num_nodes, static_cast<Eigen::Index>(flux.size()));
      for (std::size_t a = 0; a < flux.size(); ++a) {
        const auto col = flux[a].get<std::vector<double>>();
        if (col.size() != c.size()) fail(ErrorKind::InvalidArgument, "solution dump: flux size mismatch");
        sol.flux.col(static_cast<Eigen::Index>(a)) =
            Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
      }
    }
    return sol;
  } catch (const json::exception& ex) {
    fail(ErrorKind::InvalidArgument, std::string("solution dump: ") + ex.what());
  }
}

// ---------------------------------------------------------------------------
// Pipelines

SolveOutcome run_solve(const RunConfig& requested) {
  RunConfig config = requested;
  config.formulation = to_string(formulation_from_string(config.formulation));
  const ProblemSpec problem = resolve_problem(config);
  auto mesh = std::make_shared<const Mesh>(resolve_mesh(config, problem));
  const DiscretizationOptions disc = resolve_discretization(config);

  SolveOutcome out;
  out.result = solve_problem(problem, mesh, disc);
  out.report = scan_extrema(out.result.solution, config.density);
  out.report.verdicts = audit_dmp(out.report, problem);
  if (problem.analytic) out.errors = error_norms(out.result.solution, problem.analytic, config.density);

  out.output_dir = config.output_dir.empty() ? default_output_dir(config, false) : config.output_dir;
  const auto dir = prepare_dir(out.output_dir);

  write_text(dir / "config.json", run_config_json(config));
  out.files.push_back("config.json");
  write_text(dir / "solution.json", solution_dump(config, out.result.solution));
  out.files.push_back("solution.json");
  write_csv(out.report, (dir / "dmp.csv").string());
  out.files.push_back("dmp.csv");
  if (config.write_vtk) {
    write_vtk(build_viz(out.result.solution), (dir / "solution.vtk").string());
    out.files.push_back("solution.vtk");
  }

  json rep;
  rep["config"] = config_to_json(config);
  rep["problem"] = problem.name;
  rep["formulation"] = to_string(disc.formulation);
  rep["p"] = disc.order;
  rep["ngp"] = resolved_ngp(problem, disc);
  rep["mesh"] = descriptor_json(*mesh);
  const SolveReport& sr = out.result.report;
  rep["solve"] = {{"method", sr.method},
                  {"relative_residual", sr.relative_residual},
                  {"iterations", sr.iterations},
                  {"refinement_steps", sr.refinement_steps},
                  {"unknowns", out.result.solution.dof_vector().size()},
                  {"voigt_fallbacks", out.result.voigt_fallbacks}};
  if (config.include_timing) rep["solve"]["wall_time"] = sr.wall_time;
  rep["dmp"] = json::parse(dmp_report_json(out.report));
  const Verdict nn = out.report.verdicts.nonneg;
  rep["nonneg_ok"] = nn == Verdict::NotApplicable ? json(nullptr) : json(nn == Verdict::Ok);
  rep["errors"] = out.errors ? json{{"l2", out.errors->l2}, {"linf", out.errors->linf}} : json(nullptr);
  rep["files"] = out.files;
  write_text(dir / "report.json", rep.dump(2) + "\n");
  out.files.push_back("report.json");
  return out;
}

SweepOutcome run_sweep(const RunConfig& config) {
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

  SweepOutcome out;
  SweepTable all;
  all.mode = opt.mode;
  json tables = json::array();
  for (const auto& name : names) {
    const FormulationKind kind = formulation_from_string(name);
    SweepTable t = sweep(problem, base, kind, opt);
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
    tables.push_back({{"formulation", to_string(kind)},
                      {"rows", t.rows.size()},
                      {"partial", t.partial},
                      {"failure", t.failure}});
    out.tables.push_back(std::move(t));
  }

  out.output_dir = config.output_dir.empty() ? default_output_dir(config, true) : config.output_dir;
  const auto dir = prepare_dir(out.output_dir);
  write_text(dir / "config.json", run_config_json(config));
  out.files.push_back("config.json");
  write_csv(all, (dir / "sweep.csv").string());
  out.files.push_back("sweep.csv");

  json rep;
  rep["config"] = config_to_json(config);
  rep["problem"] = problem.name;
  rep["mode"] = to_string(opt.mode);
  rep["levels"] = opt.levels;
  rep["mesh"] = descriptor_json(base);
  rep["tables"] = tables;
  rep["files"] = out.files;
  write_text(dir / "report.json", rep.dump(2) + "\n");
  out.files.push_back("report.json");
  return out;
}

AuditOutcome audit_dump(const std::string& path, int density) {
  AuditOutcome out;
  const FieldSolution sol = load_solution_dump(read_text(path), &out.config);
  const ProblemSpec problem = resolve_problem(out.config);
  out.report = scan_extrema(sol, density > 0 ? density : out.config.density);
  out.report.verdicts = audit_dmp(out.report, problem);
  return out;
}

}  // namespace dmpfem
