#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmpfem/analysis.hpp"
#include "dmpfem/export.hpp"

namespace dmpfem {

/// Everything needed to reproduce a solve or a sweep. Serialises to JSON and
/// back without loss; zero-valued mesh overrides keep the problem's default.
struct RunConfig {
  std::string problem = "decay1d";
  std::string problem_file;  // text problem definition used instead of the catalog
  double k1 = 1.0;
  double k2 = 100.0;
  double lepotier_eps = 1e-3;

  std::string formulation = "single-field";
  int order = 1;
  int ngp = 0;
  std::string kernel = "variational";  // or "voigt"
  std::string solver = "auto";         // auto | direct | cg
  std::string ordering = "rcm";        // rcm | amd | natural

  int nx = 0, ny = 0, ne = 0, hole_n = 0;
  double jitter_amplitude = 0.0;
  std::uint64_t jitter_seed = 0;

  int density = 16;

  std::string sweep_mode = "p";
  std::string levels = "1..10";
  int h_order = 1;
  int jobs = 1;
  std::vector<std::string> sweep_formulations;  // empty: `formulation` only

  std::string output_dir;  // empty: derived from DMPFEM_OUT and the run name
  bool write_vtk = true;
  bool include_timing = false;

  bool operator==(const RunConfig&) const = default;
};

std::string run_config_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

ProblemSpec resolve_problem(const RunConfig& config);
Mesh resolve_mesh(const RunConfig& config, const ProblemSpec& problem);
DiscretizationOptions resolve_discretization(const RunConfig& config);

/// `<root>/<problem>-<formulation>-p<p>` for solves and
/// `<root>/<problem>-sweep-<mode>` for sweeps, with root = $DMPFEM_OUT or
/// ./out.
std::string default_output_dir(const RunConfig& config, bool sweep);

struct SolveOutcome {
  SolveResult result;
  DmpReport report;
  std::optional<ErrorNorms> errors;
  std::string output_dir;
  std::vector<std::string> files;  // names relative to output_dir
};

/// Solve, audit and write config.json, report.json, dmp.csv, solution.json
/// and (optionally) solution.vtk.
SolveOutcome run_solve(const RunConfig& config);

struct SweepOutcome {
  std::vector<SweepTable> tables;  // one per formulation
  std::string output_dir;
  std::vector<std::string> files;
};

/// Run the sweep for each requested formulation and write sweep.csv,
/// config.json and report.json.
SweepOutcome run_sweep(const RunConfig& config);

struct AuditOutcome {
  DmpReport report;
  RunConfig config;
};

/// Re-scan and re-audit a solution dump written by run_solve.
AuditOutcome audit_dump(const std::string& path, int density = 0);

/// Solution dump: resolved config, mesh, order, formulation and nodal fields.
std::string solution_dump(const RunConfig& config, const FieldSolution& sol);
FieldSolution load_solution_dump(const std::string& text, RunConfig* config = nullptr);

/// Runs the built-in invariant suites, one line per check. Returns true when
/// every check passes.
bool run_verification(std::ostream& out);

}  // namespace dmpfem
