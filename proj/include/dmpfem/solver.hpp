#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dmpfem/assembly.hpp"

namespace dmpfem {

enum class SolverMethod { Auto, Direct, Iterative };
enum class Ordering { Amd, Rcm, Natural };

const char* to_string(Ordering ordering) noexcept;
Ordering ordering_from_string(const std::string& name);

struct SolverOptions {
  SolverMethod method = SolverMethod::Auto;
  Ordering ordering = Ordering::Rcm;
  int direct_limit = 200000;  // Auto switches to CG above this size
  double cg_tolerance = 1e-12;
  int cg_max_factor = 50;     // max iterations = factor * n
  double refine_threshold = 1e-10;
};

struct SolveReport {
  std::string method;  // "cholesky" or "cg"
  double relative_residual = 0.0;
  int iterations = 0;          // CG iterations; 0 for the direct path
  int refinement_steps = 0;    // iterative-refinement corrections after Cholesky
  double wall_time = 0.0;      // seconds
  long long factor_nonzeros = 0;
};

/// Reverse Cuthill-McKee permutation of the symmetric pattern: perm[new] = old.
std::vector<int> rcm_ordering(const SparseMatrix& a);

/// Half-bandwidth max |i - j| over stored entries after applying perm.
int bandwidth(const SparseMatrix& a, const std::vector<int>& perm);

/// Solves A x = b for symmetric positive definite A. The direct path is a
/// sparse Cholesky factorisation; a non-positive pivot raises a computation
/// fault. The iterative path is Jacobi-preconditioned CG.
std::pair<Eigen::VectorXd, SolveReport> solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b,
                                                  const SolverOptions& options = {});

std::pair<Eigen::VectorXd, SolveReport> solve_spd(const AssembledSystem& system,
                                                  const SolverOptions& options = {});

/// ||b - A x|| / ||b|| (or ||b - A x|| when b = 0).
double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

}  // namespace dmpfem
