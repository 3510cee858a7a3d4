#pragma once

#include <span>
#include <vector>

namespace dmpfem {

struct LegendreEval {
  double value;
  double derivative;
};

/// L_p(xi) and L_p'(xi) by the three-term recurrence (derivative by the
/// differentiated recurrence, so xi = +-1 needs no special case).
LegendreEval legendre(int p, double xi);

/// Gauss-Lobatto-Legendre node set of order p on [-1, 1] and the Lagrange
/// interpolants through it. Immutable once built.
///
/// Nodes are ascending and exactly symmetric; interior nodes are roots of
/// L_p'. Interpolants are evaluated in barycentric form, which is the same
/// polynomial as the (xi^2 - 1) L_p'(xi) / (p (p+1) L_p(xi_j) (xi - xi_j))
/// quotient but stays accurate next to a node.
class SpectralBasis {
 public:
  explicit SpectralBasis(int order);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int size() const noexcept { return order_ + 1; }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }

  /// Values and derivatives of all p+1 interpolants at xi. Output spans must
  /// hold size() entries; `derivatives` may be empty.
  void evaluate(double xi, std::span<double> values,
                std::span<double> derivatives) const;

 private:
  int order_;
  std::vector<double> nodes_;
  std::vector<double> bary_;      // barycentric weights
  std::vector<double> diff_;      // nodal differentiation matrix, row-major
};

/// GLL nodes of order p >= 1. Newton on (1 - xi^2) L_p'(xi) seeded with the
/// Chebyshev-Gauss-Lobatto points; throws a computation fault on
/// non-convergence.
SpectralBasis gll_nodes(int p);

/// Process-wide immutable basis of order p, built on first use. Thread-safe.
const SpectralBasis& shared_basis(int p);

/// Evaluation of an n-function nodal basis at one point. Gradients are stored
/// point-major: gradient(i, d) = gradients[i * dim + d].
struct BasisEval {
  int dim = 1;
  std::vector<double> values;
  std::vector<double> gradients;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] double gradient(std::size_t i, int d) const {
    return gradients[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)];
  }
};

BasisEval lagrange_1d(const SpectralBasis& basis, double xi);

/// Tensor-product interpolants on [-1,1]^dim, dim in {2, 3}. Local index
/// (0-based) is i = j + k (p+1) in 2D and i = j + (k + l (p+1)) (p+1) in 3D,
/// where j, k, l index the xi, eta, zeta nodes.
BasisEval tensor_basis(const SpectralBasis& basis, int dim,
                       std::span<const double> point);

}  // namespace dmpfem
