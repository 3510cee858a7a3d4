#include "dmpfem/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "dmpfem/error.hpp"

namespace dmpfem {

const char* to_string(Ordering ordering) noexcept {
  switch (ordering) {
    case Ordering::Amd: return "amd";
    case Ordering::Rcm: return "rcm";
    case Ordering::Natural: return "natural";
  }
  return "amd";
}

Ordering ordering_from_string(const std::string& name) {
  if (name == "amd") return Ordering::Amd;
  if (name == "rcm") return Ordering::Rcm;
  if (name == "natural") return Ordering::Natural;
  fail(ErrorKind::InvalidArgument, "unknown ordering '" + name + "' (amd, rcm, natural)");
}

std::vector<int> rcm_ordering(const SparseMatrix& a) {
  const int n = a.rows;
  auto degree = [&](int i) { return a.row_ptr[static_cast<std::size_t>(i) + 1] - a.row_ptr[static_cast<std::size_t>(i)]; };
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<int> nbrs;

  while (static_cast<int>(order.size()) < n) {
    // Start each component from an unvisited vertex of minimum degree.
    int start = -1;
    for (int i = 0; i < n; ++i) {
      if (!seen[static_cast<std::size_t>(i)] && (start < 0 || degree(i) < degree(start))) start = i;
    }
    std::deque<int> queue{start};
    seen[static_cast<std::size_t>(start)] = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      nbrs.clear();
      for (int k = a.row_ptr[static_cast<std::size_t>(v)]; k < a.row_ptr[static_cast<std::size_t>(v) + 1]; ++k) {
        const int u = a.cols[static_cast<std::size_t>(k)];
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = 1;
          nbrs.push_back(u);
        }
      }
      std::stable_sort(nbrs.begin(), nbrs.end(), [&](int x, int y) { return degree(x) < degree(y); });
      queue.insert(queue.end(), nbrs.begin(), nbrs.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

int bandwidth(const SparseMatrix& a, const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  int bw = 0;
  for (int i = 0; i < a.rows; ++i) {
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      bw = std::max(bw, std::abs(inv[static_cast<std::size_t>(i)] -
                                 inv[static_cast<std::size_t>(a.cols[static_cast<std::size_t>(k)])]));
    }
  }
  return bw;
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double r = (b - a.multiply(x)).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& a) {
  // CSR of a symmetric matrix is the CSC of the same matrix.
  EigenSparse m(a.rows, a.rows);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.vals.size());
  for (int i = 0; i < a.rows; ++i) {
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      trip.emplace_back(i, a.cols[static_cast<std::size_t>(k)], a.vals[static_cast<std::size_t>(k)]);
    }
  }
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

template <typename Solver>
void factor_or_fail(Solver& solver, const EigenSparse& m) {
  solver.compute(m);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::Computation, "Cholesky factorisation failed: matrix is not symmetric positive definite");
  }
}

template <typename Solver>
Eigen::VectorXd refine_solution(const Solver& solver, const SparseMatrix& a, const Eigen::VectorXd& b,
                                Eigen::VectorXd x, double threshold, SolveReport& rep) {
  for (int step = 0; step < 3; ++step) {
    rep.relative_residual = relative_residual(a, x, b);
    if (!(rep.relative_residual > threshold)) break;
    x += solver.solve(b - a.multiply(x));
    ++rep.refinement_steps;
  }
  rep.relative_residual = relative_residual(a, x, b);
  return x;
}

Eigen::VectorXd direct(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opt,
                       SolveReport& rep) {
  rep.method = "cholesky";
  if (opt.ordering == Ordering::Amd) {
    Eigen::SimplicialLLT<EigenSparse, Eigen::Lower, Eigen::AMDOrdering<int>> solver;
    factor_or_fail(solver, to_eigen(a));
    rep.factor_nonzeros = solver.matrixL().nestedExpression().nonZeros();
    return refine_solution(solver, a, b, solver.solve(b), opt.refine_threshold, rep);
  }

  std::vector<int> perm(static_cast<std::size_t>(a.rows));
  if (opt.ordering == Ordering::Rcm) {
    perm = rcm_ordering(a);
  } else {
    for (int i = 0; i < a.rows; ++i) perm[static_cast<std::size_t>(i)] = i;
  }
  // Eigen permutation maps old -> new.
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(a.rows);
  for (int i = 0; i < a.rows; ++i) p.indices()(perm[static_cast<std::size_t>(i)]) = i;
  const EigenSparse full = to_eigen(a);
  EigenSparse permuted(a.rows, a.rows);
  permuted = full.twistedBy(p);

  Eigen::SimplicialLLT<EigenSparse, Eigen::Lower, Eigen::NaturalOrdering<int>> solver;
  factor_or_fail(solver, permuted);
  rep.factor_nonzeros = solver.matrixL().nestedExpression().nonZeros();

  struct Wrapped {
    const decltype(solver)& s;
    const decltype(p)& perm;
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
      const Eigen::VectorXd y = s.solve(perm * rhs);
      return perm.inverse() * y;
    }
  } wrapped{solver, p};
  return refine_solution(wrapped, a, b, wrapped.solve(b), opt.refine_threshold, rep);
}

Eigen::VectorXd pcg(const SparseMatrix& a, const Eigen::VectorXd& b, const SolverOptions& opt,
                    SolveReport& rep) {
  rep.method = "cg";
  const int n = a.rows;
  Eigen::VectorXd dinv(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0)) fail(ErrorKind::Computation, "PCG: non-positive diagonal entry");
    dinv(i) = 1.0 / d;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  const double nb = b.norm();
  if (nb == 0.0) return x;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const long long max_it = static_cast<long long>(opt.cg_max_factor) * n;
  std::deque<double> history;
  int it = 0;
  for (; it < max_it; ++it) {
    const double rel = r.norm() / nb;
    history.push_back(rel);
    if (history.size() > 5) history.pop_front();
    if (rel <= opt.cg_tolerance) break;
    const Eigen::VectorXd ap = a.multiply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) fail(ErrorKind::Computation, "PCG: matrix is not positive definite");
    const double step = rz / pap;
    x += step * p;
    r -= step * ap;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.iterations = it;
  rep.relative_residual = relative_residual(a, x, b);
  if (rep.relative_residual > opt.refine_threshold) {
    std::ostringstream msg;
    msg << "CG did not converge after " << it << " iterations; residual history tail:";
    for (double h : history) msg << ' ' << h;
    fail(ErrorKind::Computation, msg.str());
  }
  return x;
}

}  // namespace

std::pair<Eigen::VectorXd, SolveReport> solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b,
                                                  const SolverOptions& options) {
  if (b.size() != a.rows) fail(ErrorKind::InvalidArgument, "solve_spd: size mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  const bool use_direct = options.method == SolverMethod::Direct ||
                          (options.method == SolverMethod::Auto && a.rows <= options.direct_limit);
  Eigen::VectorXd x = use_direct ? direct(a, b, options, rep) : pcg(a, b, options, rep);
  if (!x.allFinite()) fail(ErrorKind::Computation, "solution contains non-finite values");
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(x), rep};
}

std::pair<Eigen::VectorXd, SolveReport> solve_spd(const AssembledSystem& system, const SolverOptions& options) {
  return solve_spd(system.matrix, system.rhs, options);
}

}  // namespace dmpfem
