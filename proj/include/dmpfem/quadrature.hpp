#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dmpfem {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  [[nodiscard]] int count() const noexcept { return static_cast<int>(points.size()); }
};

inline constexpr int kMaxGaussPoints = 32;

/// Classical Gauss-Legendre rule with 1 <= ngp <= 32.
QuadratureRule gauss_rule(int ngp);

/// Tensor-product Gauss-Legendre approximation of the integral of f over
/// [-1,1]^dim, dim in {1, 2}.
double integrate_ref(const std::function<double(std::span<const double>)>& f,
                     int ngp, int dim);

/// Central check that a rule fully integrates an order-p discretisation
/// (at least p + 1 points per direction).
void require_full_integration(const QuadratureRule& rule, int order);

}  // namespace dmpfem
