#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dmpfem/assembly.hpp"
#include "dmpfem/basis.hpp"
#include "dmpfem/mesh.hpp"
#include "dmpfem/problem.hpp"
#include "dmpfem/solver.hpp"

namespace dmpfem {

/// Nodal values of a solved field. `flux` holds q at each node (num_nodes x
/// dim) for least-squares solutions and is empty for Galerkin.
struct FieldSolution {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DofMap> dofs;
  int order = 1;
  FormulationKind formulation = FormulationKind::Galerkin;
  Eigen::VectorXd concentration;
  Eigen::MatrixXd flux;

  [[nodiscard]] int dim() const noexcept { return mesh ? mesh->dim : 0; }
  [[nodiscard]] bool has_flux() const noexcept { return flux.size() > 0; }
  /// Node-interleaved vector in the layout of the assembled system.
  [[nodiscard]] Eigen::VectorXd dof_vector() const;
};

/// Splits a solved DOF vector into fields. Constrained DOFs are written back
/// with their prescribed values.
FieldSolution make_solution(const AssembledSystem& system, std::shared_ptr<const Mesh> mesh,
                            const Eigen::VectorXd& x);

/// Concentration at master-element point (xi, eta) of element e.
double evaluate(const FieldSolution& sol, int element, double xi, double eta = 0.0);

/// Values of a nodal field of element e on the tensor grid xs x ys:
/// result(a, b) at (xs[a], ys[b]); in 1D ys is ignored and result is n x 1.
/// evaluate, scan_extrema and the visualisation sampler all go through this
/// routine, so equal points give bit-identical values.
Eigen::MatrixXd element_grid_values(const FieldSolution& sol, const Eigen::VectorXd& nodal, int element,
                                    std::span<const double> xs, std::span<const double> ys);

/// Flux at a master-element point; zero for Galerkin solutions.
Point evaluate_flux(const FieldSolution& sol, int element, double xi, double eta = 0.0);

struct DiscretizationOptions {
  FormulationKind formulation = FormulationKind::Galerkin;
  int order = 1;
  int ngp = 0;  // 0 selects default_ngp
  ElementKernel kernel = ElementKernel::Variational;
  SolverOptions solver;
  std::function<void(const std::string&)> log;
};

/// Rule actually used for a discretisation.
int resolved_ngp(const ProblemSpec& problem, const DiscretizationOptions& options);

struct SolveResult {
  FieldSolution solution;
  SolveReport report;
  int voigt_fallbacks = 0;
};

/// Assemble, impose boundary data, and solve `problem` on `mesh`.
SolveResult solve_problem(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh,
                          const DiscretizationOptions& options);

/// The assembled and constrained system that solve_problem factorises.
AssembledSystem build_system(const ProblemSpec& problem, const Mesh& mesh, const DiscretizationOptions& options);

enum class Verdict { Ok, Violated, NotApplicable };

const char* to_string(Verdict v) noexcept;
Verdict verdict_from_string(const std::string& name);

struct Verdicts {
  Verdict nonneg = Verdict::NotApplicable;
  Verdict mp_diffusion = Verdict::NotApplicable;
  Verdict mp_decay = Verdict::NotApplicable;

  bool operator==(const Verdicts&) const = default;
};

/// Extrema of the concentration over the scan set. Boundary samples are those
/// lying on a boundary edge of the mesh; the rest are interior.
struct DmpReport {
  double min_value = 0.0;
  Point min_location = Point::Zero();
  double max_value = 0.0;
  Point max_location = Point::Zero();
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  double interior_min = 0.0;
  double interior_max = 0.0;
  bool has_interior = false;
  double negative_fraction = 0.0;
  long long samples = 0;
  int eval_density = 16;
  Verdicts verdicts;
};

inline constexpr double kNegativeTolerance = 1e-13;
inline constexpr double kVerdictTolerance = 1e-12;

/// Per element: the density x density GLL grid (order density - 1) together
/// with the element's own nodes. density >= 2.
DmpReport scan_extrema(const FieldSolution& sol, int density = 16);

/// Maximum-principle and non-negativity verdicts from recorded extrema and
/// problem metadata. Mixed-sign forcing leaves every verdict not applicable.
Verdicts audit_dmp(const DmpReport& report, const ProblemSpec& problem);

struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

/// L2 by Gauss quadrature with p + 3 points per direction; L-infinity over the
/// scan set at `density`.
ErrorNorms error_norms(const FieldSolution& sol, const std::function<double(const Point&)>& analytic,
                       int density = 16);

/// Least-squares functional of the solution (including the Neumann term),
/// integrated with `ngp` points per direction (0 selects the assembly rule).
double ls_functional_value(const FieldSolution& sol, const ProblemSpec& problem, const Formulation& form,
                           int ngp = 0);

/// Galerkin energy 1/2 B(c, c) - F(c) by quadrature.
double galerkin_energy(const FieldSolution& sol, const ProblemSpec& problem, int ngp = 0);

enum class SweepMode { P, H };

const char* to_string(SweepMode mode) noexcept;
SweepMode sweep_mode_from_string(const std::string& name);

struct SweepRow {
  int level = 1;
  FormulationKind formulation = FormulationKind::Galerkin;
  int order = 1;
  int elements = 0;
  double min_concentration = 0.0;
  Point min_location = Point::Zero();

  bool operator==(const SweepRow&) const = default;
};

struct SweepTable {
  SweepMode mode = SweepMode::P;
  std::vector<SweepRow> rows;
  bool partial = false;
  std::string failure;  // message of the first failing level

  bool operator==(const SweepTable&) const = default;
};

struct SweepOptions {
  SweepMode mode = SweepMode::P;
  std::vector<int> levels;
  int h_order = 1;   // polynomial order for h-mode
  int density = 16;
  int jobs = 1;
  DiscretizationOptions discretization;  // order is overridden per row
};

/// p-mode: p = level on the base mesh. h-mode: p = h_order on
/// refine(base, level), with level 1 meaning the base mesh itself.
SweepTable sweep(const ProblemSpec& problem, const Mesh& base, FormulationKind formulation,
                 const SweepOptions& options);

/// Parses `1..10`, `1,2,5` or a mix such as `1..3,8`.
std::vector<int> parse_levels(const std::string& text);

}  // namespace dmpfem
