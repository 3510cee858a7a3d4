#include "dmpfem/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "dmpfem/error.hpp"

namespace dmpfem {

LegendreEval legendre(int p, double xi) {
  if (p < 0) fail(ErrorKind::InvalidArgument, "legendre: order must be >= 0");
  if (p == 0) return {1.0, 0.0};

  double l_prev = 1.0, l_cur = xi;
  double d_prev = 0.0, d_cur = 1.0;
  for (int k = 1; k < p; ++k) {
    const double l_next = ((2 * k + 1) * xi * l_cur - k * l_prev) / (k + 1);
    const double d_next =
        ((2 * k + 1) * (l_cur + xi * d_cur) - k * d_prev) / (k + 1);
    l_prev = l_cur;
    l_cur = l_next;
    d_prev = d_cur;
    d_cur = d_next;
  }
  return {l_cur, d_cur};
}

namespace {

constexpr double kNewtonTol = 1e-14;
constexpr int kNewtonMaxIter = 100;

std::vector<double> compute_gll_nodes(int p) {
  std::vector<double> nodes(static_cast<std::size_t>(p) + 1);
  nodes.front() = -1.0;
  nodes.back() = 1.0;
  const double pp1 = static_cast<double>(p) * (p + 1);

  // Interior roots of (1 - xi^2) L_p'; its derivative is -p(p+1) L_p.
  for (int i = 1; i < p; ++i) {
    double xi = -std::cos(std::numbers::pi * i / p);
    double residual = 0.0;
    bool converged = false;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      const auto [l, dl] = legendre(p, xi);
      residual = (1.0 - xi * xi) * dl;
      const double step = residual / (-pp1 * l);
      xi -= step;
      if (std::abs(step) < kNewtonTol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "gll_nodes: Newton did not converge for order " << p
          << ", node " << i << ", residual " << residual;
      fail(ErrorKind::Computation, msg.str());
    }
    nodes[static_cast<std::size_t>(i)] = xi;
  }

  for (int i = 0; i <= p / 2; ++i) {
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(p - i);
    const double half = 0.5 * (nodes[hi] - nodes[lo]);
    nodes[lo] = -half;
    nodes[hi] = half;
  }
  if (p % 2 == 0) nodes[static_cast<std::size_t>(p / 2)] = 0.0;
  return nodes;
}

}  // namespace

SpectralBasis::SpectralBasis(int order) : order_(order) {
  if (order < 1) fail(ErrorKind::InvalidArgument, "SpectralBasis: order must be >= 1");
  nodes_ = compute_gll_nodes(order);

  const std::size_t n = nodes_.size();
  bary_.assign(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) bary_[j] *= nodes_[j] - nodes_[k];
    }
    bary_[j] = 1.0 / bary_[j];
  }

  diff_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (bary_[j] / bary_[i]) / (nodes_[i] - nodes_[j]);
      diff_[i * n + j] = d;
      diag -= d;
    }
    diff_[i * n + i] = diag;
  }
}

void SpectralBasis::evaluate(double xi, std::span<double> values,
                             std::span<double> derivatives) const {
  const std::size_t n = nodes_.size();
  const bool want_deriv = !derivatives.empty();

  for (std::size_t m = 0; m < n; ++m) {
    if (xi == nodes_[m]) {
      for (std::size_t j = 0; j < n; ++j) values[j] = (j == m) ? 1.0 : 0.0;
      if (want_deriv) {
        for (std::size_t j = 0; j < n; ++j) derivatives[j] = diff_[m * n + j];
      }
      return;
    }
  }

  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = bary_[j] / (xi - nodes_[j]);
    values[j] = t;
    denom += t;
  }
  for (std::size_t j = 0; j < n; ++j) values[j] /= denom;

  if (want_deriv) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) s += 1.0 / (xi - nodes_[k]);
      }
      derivatives[j] = values[j] * s;
    }
  }
}

SpectralBasis gll_nodes(int p) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "gll_nodes: order must be >= 1");
  return SpectralBasis(p);
}

const SpectralBasis& shared_basis(int p) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const SpectralBasis>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[p];
  if (!slot) slot = std::make_unique<const SpectralBasis>(p);
  return *slot;
}

BasisEval lagrange_1d(const SpectralBasis& basis, double xi) {
  BasisEval out;
  out.dim = 1;
  out.values.resize(static_cast<std::size_t>(basis.size()));
  out.gradients.resize(static_cast<std::size_t>(basis.size()));
  basis.evaluate(xi, out.values, out.gradients);
  return out;
}

BasisEval tensor_basis(const SpectralBasis& basis, int dim,
                       std::span<const double> point) {
  if (dim != 2 && dim != 3) {
    fail(ErrorKind::InvalidArgument, "tensor_basis: dim must be 2 or 3");
  }
  if (point.size() < static_cast<std::size_t>(dim)) {
    fail(ErrorKind::InvalidArgument, "tensor_basis: point has too few coordinates");
  }
  const auto m = static_cast<std::size_t>(basis.size());
  std::vector<double> v(m * 3), d(m * 3);
  for (int a = 0; a < dim; ++a) {
    const auto off = static_cast<std::size_t>(a) * m;
    basis.evaluate(point[static_cast<std::size_t>(a)],
                   std::span<double>(v).subspan(off, m),
                   std::span<double>(d).subspan(off, m));
  }

  BasisEval out;
  out.dim = dim;
  const auto ud = static_cast<std::size_t>(dim);
  if (dim == 2) {
    out.values.resize(m * m);
    out.gradients.resize(m * m * 2);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j + k * m;
        out.values[i] = v[j] * v[m + k];
        out.gradients[i * ud + 0] = d[j] * v[m + k];
        out.gradients[i * ud + 1] = v[j] * d[m + k];
      }
    }
  } else {
    out.values.resize(m * m * m);
    out.gradients.resize(m * m * m * 3);
    for (std::size_t l = 0; l < m; ++l) {
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t i = j + (k + l * m) * m;
          const double vx = v[j], vy = v[m + k], vz = v[2 * m + l];
          out.values[i] = vx * vy * vz;
          out.gradients[i * ud + 0] = d[j] * vy * vz;
          out.gradients[i * ud + 1] = vx * d[m + k] * vz;
          out.gradients[i * ud + 2] = vx * vy * d[2 * m + l];
        }
      }
    }
  }
  return out;
}

}  // namespace dmpfem
