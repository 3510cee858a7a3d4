#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dmpfem/basis.hpp"
#include "dmpfem/mesh.hpp"
#include "dmpfem/problem.hpp"
#include "dmpfem/quadrature.hpp"

namespace dmpfem {

enum class FormulationKind { Galerkin, LS1, LS2 };

const char* to_string(FormulationKind kind) noexcept;

/// Accepts `single-field`, `galerkin`, `ls1`, `ls2`.
FormulationKind formulation_from_string(const std::string& name);

/// Least-squares weights. LS1: A = I, beta = 1. LS2: A = D^{-1/2},
/// beta = alpha^{-1/2} where alpha != 0 and 1 where alpha == 0.
struct Formulation {
  FormulationKind kind = FormulationKind::Galerkin;

  [[nodiscard]] bool least_squares() const noexcept { return kind != FormulationKind::Galerkin; }
  [[nodiscard]] double beta_squared(double alpha) const;
  /// A(x); only the leading 1x1 block is meaningful in 1D.
  [[nodiscard]] Eigen::Matrix2d weight(const Eigen::Matrix2d& d, int dim) const;
};

/// Unknowns per node: 1 for Galerkin, 1 + dim for the mixed (c, q) forms.
int fields_per_node(FormulationKind kind, int dim);

/// Default points per direction: p + 1 for Galerkin with piecewise-constant
/// coefficients, p + 2 otherwise.
int default_ngp(FormulationKind kind, int order, bool variable_coefficients);

/// Basis values and master-element gradients at the tensor Gauss points.
struct ElementBasisTable {
  int dim = 2;
  int order = 1;
  int nodes = 0;
  std::vector<double> xi, eta, weight;  // one entry per quadrature point
  Eigen::MatrixXd values;               // nodes x points
  Eigen::MatrixXd dxi, deta;            // nodes x points

  [[nodiscard]] int points() const noexcept { return static_cast<int>(weight.size()); }
};

ElementBasisTable make_basis_table(const SpectralBasis& basis, const QuadratureRule& rule, int dim);

/// Dense element matrix and load. Unknowns are field-major: index
/// field * nodes + local_node, fields ordered (c), (c, q) or (c, q_x, q_y).
struct ElementSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd vector;
  int fields = 1;
  int nodes = 0;
};

ElementSystem element_galerkin(const ElementMap& map, const CoefficientField& coeff,
                               const ElementBasisTable& table);
ElementSystem element_galerkin(const ElementMap& map, const CoefficientField& coeff,
                               const SpectralBasis& basis, const QuadratureRule& rule);

/// Volume terms of the least-squares bilinear form and load, built as
/// sum_q B_q^T B_q from the weighted residual operators
/// beta (alpha c + div q) and A (q + D grad c).
ElementSystem element_ls(const ElementMap& map, const CoefficientField& coeff,
                         const ElementBasisTable& table, const Formulation& form);
ElementSystem element_ls(const ElementMap& map, const CoefficientField& coeff,
                         const SpectralBasis& basis, const QuadratureRule& rule,
                         const Formulation& form);

/// Closed-form K^{ab} blocks in S-product notation (2D only). LS1 reproduces
/// the variational LS1 operator; the LS2 expressions carry no beta^2 factor,
/// so they match variational LS2 only where alpha = 0.
ElementSystem element_ls1_voigt(const ElementMap& map, const CoefficientField& coeff,
                                const SpectralBasis& basis, const QuadratureRule& rule);
ElementSystem element_ls2_voigt(const ElementMap& map, const CoefficientField& coeff,
                                const SpectralBasis& basis, const QuadratureRule& rule);

/// Max entry-wise difference of matrices and loads, divided by
/// max(1, max |entry of a|).
double element_discrepancy(const ElementSystem& a, const ElementSystem& b);

/// Compressed-row sparse matrix with sorted column indices per row.
struct SparseMatrix {
  int rows = 0;
  std::vector<int> row_ptr{0};
  std::vector<int> cols;
  std::vector<double> vals;

  [[nodiscard]] int nnz() const noexcept { return static_cast<int>(cols.size()); }
  /// Stored entry (i, j), or 0 when outside the pattern.
  [[nodiscard]] double coeff(int i, int j) const;
  [[nodiscard]] Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  [[nodiscard]] double max_abs() const;
  /// max |A_ij - A_ji| over stored entries.
  [[nodiscard]] double asymmetry() const;
};

struct Constraint {
  int dof = 0;
  double value = 0.0;
};

enum class ElementKernel { Variational, Voigt };

struct AssemblyOptions {
  ElementKernel kernel = ElementKernel::Variational;
  double voigt_tolerance = 1e-10;
  /// Receives a line per element where the closed-form kernel disagrees with
  /// the variational one. Defaults to std::clog.
  std::function<void(const std::string&)> log;
};

/// Global system. DOF of (node, field) is node * fields + field.
struct AssembledSystem {
  FormulationKind formulation = FormulationKind::Galerkin;
  int dim = 2;
  int order = 1;
  int fields = 1;
  std::shared_ptr<const DofMap> dofs;
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<Constraint> constraints;
  int voigt_fallbacks = 0;

  [[nodiscard]] int size() const noexcept { return matrix.rows; }
  [[nodiscard]] int dof(int node, int field) const noexcept { return node * fields + field; }
};

/// Scatter-add of element systems in element order. For least-squares forms
/// the Neumann-edge term (w.n)(q.n) is included here; Neumann loads are added
/// by neumann_load.
AssembledSystem assemble_global(const Mesh& mesh, const CoefficientField& coeff,
                                const SpectralBasis& basis, const Formulation& form,
                                const QuadratureRule& rule, const AssemblyOptions& options = {});

/// Adds the prescribed-flux boundary load: +int w t^p for Galerkin,
/// -int (w.n) t^p for least squares.
AssembledSystem neumann_load(AssembledSystem system, const Mesh& mesh, const BoundaryData& boundary,
                             const SpectralBasis& basis, const QuadratureRule& rule);

/// Symmetric elimination of the concentration DOFs on Dirichlet nodes.
/// Flux DOFs are never constrained.
AssembledSystem apply_dirichlet(AssembledSystem system, const BoundaryData& boundary);

/// Same elimination with explicit (dof, value) pairs.
AssembledSystem apply_constraints(AssembledSystem system, std::vector<Constraint> constraints);

}  // namespace dmpfem
