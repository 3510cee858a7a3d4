#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dmpfem/mesh.hpp"

namespace dmpfem {

enum class Sign { Zero, NonNegative, NonPositive, Mixed };

const char* to_string(Sign s) noexcept;

/// Decay alpha(x) >= 0, symmetric diffusivity D(x), and source f(x).
/// In 1D only D(0,0) is read. The bound fields document the ellipticity
/// window the sampled coefficients are expected to stay in.
struct CoefficientField {
  std::function<double(const Point&)> alpha;
  std::function<Eigen::Matrix2d(const Point&)> diffusivity;
  std::function<double(const Point&)> forcing;
  double alpha_bound = 1.0;  // strict upper bound alpha_0
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  bool alpha_zero = true;   // alpha == 0 everywhere
  Sign forcing_sign = Sign::Zero;
  bool variable_coefficients = false;  // smooth x-dependence inside elements
};

struct BoundaryData {
  std::function<double(const Point&, int region)> dirichlet;
  std::function<double(const Point&)> neumann;  // empty means t^p = 0
  bool dirichlet_nonneg = true;
};

struct ProblemSpec {
  std::string name;
  int dim = 2;
  MeshDescriptor mesh;
  CoefficientField coeff;
  BoundaryData boundary;
  std::function<double(const Point&)> analytic;  // empty when unknown
  std::string summary;
};

/// Parameters of the parameterised catalog entries.
struct ProblemParams {
  double k1 = 1.0;
  double k2 = 100.0;
  double lepotier_eps = 1e-3;
};

/// One of decay1d, forced1d, burman_ern, lepotier, hole.
ProblemSpec canonical_problem(const std::string& id, const ProblemParams& params = {});
const std::vector<std::string>& canonical_problem_ids();

/// Closed-form solution of alpha c - c'' = 0 on (0,1), c(0) = c(1) = 1,
/// written with decaying exponentials only so alpha = 1e6 stays finite.
double analytic_decay1d(double alpha, double x);

/// Closed-form solution of -c'' = 200 exp(-10(x+1)) on (-1,1) with zero ends.
double analytic_forced1d(double x);

Eigen::Matrix2d lepotier_diffusivity(double x, double y, double eps);

/// R diag(k1, k2) R^T with R = [[cos t, sin t], [-sin t, cos t]].
Eigen::Matrix2d rotated_diffusivity(double k1, double k2, double theta);

/// Symmetric eigenvalues of a 2x2 symmetric matrix, ascending.
std::pair<double, double> sym_eigenvalues(const Eigen::Matrix2d& d);

/// D^{-1/2} by closed-form 2x2 eigendecomposition. Throws a
/// degenerate-coefficient fault when an eigenvalue is <= 1e-14.
Eigen::Matrix2d d_inv_sqrt(const Eigen::Matrix2d& d);

/// User problem from a `key = value` text file. Keys: name, dim, domain
/// (a b | x0 y0 x1 y1), elements (ne | nx ny), alpha, diffusivity (d | dxx dxy
/// dyy), forcing (`poly c px py ...` or `indicator x0 x1 [y0 y1] value`),
/// dirichlet, dirichlet_inner, mesh (rectangle | hole), hole_n.
ProblemSpec load_problem_config(std::istream& in);
ProblemSpec load_problem_file(const std::string& path);

}  // namespace dmpfem
