// Command-line front end: list-problems, solve, sweep, audit, verify.
//
// Exit codes: 0 success, 1 usage error, 2 computation or I/O fault (and a
// non-negativity violation when --expect-nonneg is given).

#include <cstdio>
#include <functional>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "dmpfem/error.hpp"
#include "dmpfem/run.hpp"

namespace {

using dmpfem::RunConfig;

constexpr int kExitUsage = 1;
constexpr int kExitFault = 2;

/// Options write into a scratch config; after parsing, only the options the
/// user actually gave are copied onto the base config (defaults or --config).
class Bindings {
 public:
  template <class T>
  CLI::Option* option(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_option(name, scratch_.*field, help)->capture_default_str();
    entries_.push_back({opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_flag(name, scratch_.*field, help);
    entries_.push_back({opt, [field](RunConfig& dst, const RunConfig& src) { dst.*field = src.*field; }});
    return opt;
  }

  void apply(RunConfig& dst) const {
    for (const auto& e : entries_) {
      if (e.option->count() > 0) e.copy(dst, scratch_);
    }
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(RunConfig&, const RunConfig&)> copy;
  };
  RunConfig scratch_;
  std::vector<Entry> entries_;
};

void add_problem_options(CLI::App* app, Bindings& b) {
  b.option(app, "--problem", &RunConfig::problem, "canonical problem id (see list-problems)");
  b.option(app, "--problem-file", &RunConfig::problem_file, "text problem definition used instead of --problem");
  b.option(app, "--k1", &RunConfig::k1, "hole problem: first diffusivity eigenvalue");
  b.option(app, "--k2", &RunConfig::k2, "hole problem: second diffusivity eigenvalue");
  b.option(app, "--lepotier-eps", &RunConfig::lepotier_eps, "lepotier problem: anisotropy parameter");
}

void add_discretization_options(CLI::App* app, Bindings& b) {
  b.option(app, "--p", &RunConfig::order, "polynomial order")->check(CLI::Range(1, 30));
  b.option(app, "--ngp", &RunConfig::ngp, "Gauss points per direction (0: default)")->check(CLI::Range(0, 32));
  b.option(app, "--kernel", &RunConfig::kernel, "element kernel")
      ->check(CLI::IsMember({"variational", "voigt"}));
  b.option(app, "--solver", &RunConfig::solver, "linear solver")->check(CLI::IsMember({"auto", "direct", "cg"}));
  b.option(app, "--ordering", &RunConfig::ordering, "fill-reducing ordering for Cholesky")
      ->check(CLI::IsMember({"rcm", "amd", "natural"}));
}

void add_mesh_options(CLI::App* app, Bindings& b) {
  b.option(app, "--nx", &RunConfig::nx, "rectangle elements along x")->check(CLI::NonNegativeNumber);
  b.option(app, "--ny", &RunConfig::ny, "rectangle elements along y")->check(CLI::NonNegativeNumber);
  b.option(app, "--ne", &RunConfig::ne, "interval element count")->check(CLI::NonNegativeNumber);
  b.option(app, "--hole-n", &RunConfig::hole_n, "hole mesh refinement n (9n x 9n grid)")
      ->check(CLI::NonNegativeNumber);
  b.option(app, "--jitter", &RunConfig::jitter_amplitude, "vertex jitter amplitude")->check(CLI::Range(0.0, 0.49));
  b.option(app, "--seed", &RunConfig::jitter_seed, "jitter seed");
}

void add_output_options(CLI::App* app, Bindings& b) {
  b.option(app, "--density", &RunConfig::density, "scan points per direction per element")
      ->check(CLI::Range(2, 200));
  b.option(app, "-o,--output", &RunConfig::output_dir, "output directory");
  b.flag(app, "--timing", &RunConfig::include_timing, "record wall time in report.json");
}

const char* verdict_text(dmpfem::Verdict v) { return dmpfem::to_string(v); }

void print_report(const dmpfem::DmpReport& r) {
  std::printf("min %.6e at (%.6g, %.6g)\n", r.min_value, r.min_location.x(), r.min_location.y());
  std::printf("max %.6e at (%.6g, %.6g)\n", r.max_value, r.max_location.x(), r.max_location.y());
  std::printf("negative fraction %.6g over %lld samples\n", r.negative_fraction, r.samples);
  std::printf("nonneg %s, mp_diffusion %s, mp_decay %s\n", verdict_text(r.verdicts.nonneg),
              verdict_text(r.verdicts.mp_diffusion), verdict_text(r.verdicts.mp_decay));
}

bool nonneg_holds(const dmpfem::DmpReport& r) {
  if (r.verdicts.nonneg == dmpfem::Verdict::Violated) return false;
  return r.min_value >= -dmpfem::kVerdictTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral/hp least-squares and Galerkin solver with maximum-principle audits", "dmpfem"};
  app.require_subcommand(1);

  std::string config_path;
  bool expect_nonneg = false;
  bool no_vtk = false;
  std::string dump_path;
  int audit_density = 0;

  auto* list = app.add_subcommand("list-problems", "list the canonical problems");

  Bindings solve_b;
  auto* solve = app.add_subcommand("solve", "assemble, solve, audit and export one problem");
  solve->add_option("--config", config_path, "JSON run config (or report) to start from")->check(CLI::ExistingFile);
  add_problem_options(solve, solve_b);
  solve_b.option(solve, "--formulation", &RunConfig::formulation, "single-field (galerkin), ls1 or ls2")
      ->check(CLI::IsMember({"single-field", "galerkin", "ls1", "ls2"}));
  add_discretization_options(solve, solve_b);
  add_mesh_options(solve, solve_b);
  add_output_options(solve, solve_b);
  solve->add_flag("--no-vtk", no_vtk, "skip the VTK export");
  solve->add_flag("--expect-nonneg", expect_nonneg, "exit 2 when the solution takes negative values");

  Bindings sweep_b;
  auto* sweep = app.add_subcommand("sweep", "minimum concentration over a p or h refinement sequence");
  sweep->add_option("--config", config_path, "JSON run config (or report) to start from")->check(CLI::ExistingFile);
  add_problem_options(sweep, sweep_b);
  sweep_b.option(sweep, "--formulation", &RunConfig::sweep_formulations, "one or more formulations")
      ->delimiter(',')
      ->check(CLI::IsMember({"single-field", "galerkin", "ls1", "ls2"}));
  sweep_b.option(sweep, "--mode", &RunConfig::sweep_mode, "p or h")->check(CLI::IsMember({"p", "h"}));
  sweep_b.option(sweep, "--levels", &RunConfig::levels, "levels such as 1..10 or 1..3,8");
  sweep_b.option(sweep, "--h-order", &RunConfig::h_order, "polynomial order in h mode")->check(CLI::Range(1, 30));
  sweep_b.option(sweep, "--jobs", &RunConfig::jobs, "parallel levels")->check(CLI::Range(1, 256));
  add_discretization_options(sweep, sweep_b);
  add_mesh_options(sweep, sweep_b);
  add_output_options(sweep, sweep_b);

  auto* audit = app.add_subcommand("audit", "re-audit a stored solution dump");
  audit->add_option("dump", dump_path, "solution.json written by solve")->required()->check(CLI::ExistingFile);
  audit->add_option("--density", audit_density, "scan density (0: as recorded)")->check(CLI::Range(0, 200));
  audit->add_flag("--expect-nonneg", expect_nonneg, "exit 2 when the solution takes negative values");

  auto* verify = app.add_subcommand("verify", "run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& id : dmpfem::canonical_problem_ids()) {
        std::printf("%-12s %s\n", id.c_str(), dmpfem::canonical_problem(id).summary.c_str());
      }
      return 0;
    }

    if (verify->parsed()) return dmpfem::run_verification(std::cout) ? 0 : kExitFault;

    if (audit->parsed()) {
      const dmpfem::AuditOutcome a = dmpfem::audit_dump(dump_path, audit_density);
      print_report(a.report);
      return (expect_nonneg && !nonneg_holds(a.report)) ? kExitFault : 0;
    }

    RunConfig config = config_path.empty() ? RunConfig{} : dmpfem::load_run_config(config_path);

    if (solve->parsed()) {
      solve_b.apply(config);
      if (no_vtk) config.write_vtk = false;
      const dmpfem::SolveOutcome s = dmpfem::run_solve(config);
      std::printf("output %s\n", s.output_dir.c_str());
      std::printf("solver %s, relative residual %.3e\n", s.result.report.method.c_str(),
                  s.result.report.relative_residual);
      print_report(s.report);
      if (s.errors) std::printf("error L2 %.6e, Linf %.6e\n", s.errors->l2, s.errors->linf);
      return (expect_nonneg && !nonneg_holds(s.report)) ? kExitFault : 0;
    }

    if (sweep->parsed()) {
      sweep_b.apply(config);
      const dmpfem::SweepOutcome s = dmpfem::run_sweep(config);
      std::printf("output %s\n", s.output_dir.c_str());
      bool partial = false;
      for (const auto& t : s.tables) {
        for (const auto& r : t.rows) {
          std::printf("%-12s level %3d  p %2d  elements %6d  min % .6e\n", dmpfem::to_string(r.formulation),
                      r.level, r.order, r.elements, r.min_concentration);
        }
        if (t.partial) {
          std::fprintf(stderr, "sweep stopped early: %s\n", t.failure.c_str());
          partial = true;
        }
      }
      return partial ? kExitFault : 0;
    }
  } catch (const dmpfem::Error& e) {
    std::fprintf(stderr, "dmpfem: %s: %s\n", dmpfem::to_string(e.kind()), e.what());
    return e.kind() == dmpfem::ErrorKind::InvalidArgument ? kExitUsage : kExitFault;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dmpfem: %s\n", e.what());
    return kExitFault;
  }
  return kExitUsage;
}
