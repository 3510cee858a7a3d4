#include "dmpfem/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dmpfem/basis.hpp"
#include "dmpfem/error.hpp"

namespace dmpfem {

QuadratureRule gauss_rule(int ngp) {
  if (ngp < 1 || ngp > kMaxGaussPoints) {
    std::ostringstream msg;
    msg << "gauss_rule: ngp = " << ngp << " outside [1, " << kMaxGaussPoints << "]";
    fail(ErrorKind::InvalidArgument, msg.str());
  }
  QuadratureRule rule;
  const auto n = static_cast<std::size_t>(ngp);
  rule.points.resize(n);
  rule.weights.resize(n);

  for (int i = 0; i < (ngp + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (ngp + 0.5));
    double dl = 0.0;
    for (int it = 0; it < 100; ++it) {
      const auto ev = legendre(ngp, x);
      dl = ev.derivative;
      const double step = ev.value / dl;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    dl = legendre(ngp, x).derivative;
    const double w = 2.0 / ((1.0 - x * x) * dl * dl);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = n - 1 - lo;
    rule.points[lo] = -x;
    rule.points[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (ngp % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

double integrate_ref(const std::function<double(std::span<const double>)>& f,
                     int ngp, int dim) {
  if (dim != 1 && dim != 2) {
    fail(ErrorKind::InvalidArgument, "integrate_ref: dim must be 1 or 2");
  }
  const QuadratureRule rule = gauss_rule(ngp);
  double sum = 0.0;
  std::array<double, 2> pt{};
  if (dim == 1) {
    for (int i = 0; i < rule.count(); ++i) {
      pt[0] = rule.points[static_cast<std::size_t>(i)];
      sum += rule.weights[static_cast<std::size_t>(i)] * f(std::span<const double>(pt.data(), 1));
    }
    return sum;
  }
  for (int j = 0; j < rule.count(); ++j) {
    for (int i = 0; i < rule.count(); ++i) {
      pt = {rule.points[static_cast<std::size_t>(i)], rule.points[static_cast<std::size_t>(j)]};
      sum += rule.weights[static_cast<std::size_t>(i)] *
             rule.weights[static_cast<std::size_t>(j)] * f(pt);
    }
  }
  return sum;
}

void require_full_integration(const QuadratureRule& rule, int order) {
  if (rule.count() < order + 1) {
    std::ostringstream msg;
    msg << "quadrature with " << rule.count()
        << " points per direction under-integrates order " << order
        << " (need at least " << order + 1 << ")";
    fail(ErrorKind::InvalidArgument, msg.str());
  }
}

}  // namespace dmpfem
