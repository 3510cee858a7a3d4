#include "dmpfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "dmpfem/error.hpp"

namespace dmpfem {

const char* to_string(FormulationKind kind) noexcept {
  switch (kind) {
    case FormulationKind::Galerkin: return "single-field";
    case FormulationKind::LS1: return "ls1";
    case FormulationKind::LS2: return "ls2";
  }
  return "single-field";
}

FormulationKind formulation_from_string(const std::string& name) {
  if (name == "single-field" || name == "galerkin") return FormulationKind::Galerkin;
  if (name == "ls1") return FormulationKind::LS1;
  if (name == "ls2") return FormulationKind::LS2;
  fail(ErrorKind::InvalidArgument, "unknown formulation '" + name + "' (single-field, galerkin, ls1, ls2)");
}

double Formulation::beta_squared(double alpha) const {
  if (kind == FormulationKind::LS2 && alpha != 0.0) return 1.0 / alpha;
  return 1.0;
}

Eigen::Matrix2d Formulation::weight(const Eigen::Matrix2d& d, int dim) const {
  if (kind != FormulationKind::LS2) return Eigen::Matrix2d::Identity();
  if (dim == 1) {
    if (!(d(0, 0) > 1e-14)) fail(ErrorKind::DegenerateCoefficient, "LS2 weight: diffusivity <= 1e-14");
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
    a(0, 0) = 1.0 / std::sqrt(d(0, 0));
    return a;
  }
  return d_inv_sqrt(d);
}

int fields_per_node(FormulationKind kind, int dim) {
  return kind == FormulationKind::Galerkin ? 1 : 1 + dim;
}

int default_ngp(FormulationKind kind, int order, bool variable_coefficients) {
  if (kind == FormulationKind::Galerkin && !variable_coefficients) return order + 1;
  return order + 2;
}

ElementBasisTable make_basis_table(const SpectralBasis& basis, const QuadratureRule& rule, int dim) {
  require_full_integration(rule, basis.order());
  ElementBasisTable t;
  t.dim = dim;
  t.order = basis.order();
  const int m = basis.size();
  const int nq1 = rule.count();
  t.nodes = dim == 1 ? m : m * m;
  const int nq = dim == 1 ? nq1 : nq1 * nq1;
  t.values.resize(t.nodes, nq);
  t.dxi.resize(t.nodes, nq);
  t.deta = Eigen::MatrixXd::Zero(t.nodes, nq);

  std::vector<double> v(static_cast<std::size_t>(m) * static_cast<std::size_t>(nq1));
  std::vector<double> d(v.size());
  for (int q = 0; q < nq1; ++q) {
    basis.evaluate(rule.points[static_cast<std::size_t>(q)],
                   std::span<double>(v).subspan(static_cast<std::size_t>(q * m), static_cast<std::size_t>(m)),
                   std::span<double>(d).subspan(static_cast<std::size_t>(q * m), static_cast<std::size_t>(m)));
  }
  auto at = [m](const std::vector<double>& a, int q, int j) {
    return a[static_cast<std::size_t>(q * m + j)];
  };

  if (dim == 1) {
    for (int q = 0; q < nq1; ++q) {
      t.xi.push_back(rule.points[static_cast<std::size_t>(q)]);
      t.eta.push_back(0.0);
      t.weight.push_back(rule.weights[static_cast<std::size_t>(q)]);
      for (int j = 0; j < m; ++j) {
        t.values(j, q) = at(v, q, j);
        t.dxi(j, q) = at(d, q, j);
      }
    }
    return t;
  }
  for (int qy = 0; qy < nq1; ++qy) {
    for (int qx = 0; qx < nq1; ++qx) {
      const int q = qx + qy * nq1;
      t.xi.push_back(rule.points[static_cast<std::size_t>(qx)]);
      t.eta.push_back(rule.points[static_cast<std::size_t>(qy)]);
      t.weight.push_back(rule.weights[static_cast<std::size_t>(qx)] * rule.weights[static_cast<std::size_t>(qy)]);
      for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
          const int i = j + k * m;
          t.values(i, q) = at(v, qx, j) * at(v, qy, k);
          t.dxi(i, q) = at(d, qx, j) * at(v, qy, k);
          t.deta(i, q) = at(v, qx, j) * at(d, qy, k);
        }
      }
    }
  }
  return t;
}

namespace {

struct QuadPoint {
  Point x;
  double wdet;  // weight * det J
  Eigen::VectorXd psi;
  Eigen::MatrixXd grad;  // nodes x dim, physical
};

void eval_point(const ElementMap& map, const ElementBasisTable& t, int q, QuadPoint& out) {
  const double xi = t.xi[static_cast<std::size_t>(q)];
  const double eta = t.eta[static_cast<std::size_t>(q)];
  const Eigen::Matrix2d jac = map.jacobian(xi, eta);
  const double det = jac.determinant();
  if (!(det > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive Jacobian determinant " << det << " at (" << xi << ", " << eta << ")";
    fail(ErrorKind::Mesh, msg.str());
  }
  out.x = map.point(xi, eta);
  out.wdet = t.weight[static_cast<std::size_t>(q)] * det;
  out.psi = t.values.col(q);
  if (t.dim == 1) {
    out.grad = t.dxi.col(q) / jac(0, 0);
    return;
  }
  const Eigen::Matrix2d jit = jac.inverse().transpose();
  out.grad.resize(t.nodes, 2);
  out.grad.col(0) = jit(0, 0) * t.dxi.col(q) + jit(0, 1) * t.deta.col(q);
  out.grad.col(1) = jit(1, 0) * t.dxi.col(q) + jit(1, 1) * t.deta.col(q);
}

void symmetrize(Eigen::MatrixXd& k) {
  k = 0.5 * (k + k.transpose()).eval();
}

}  // namespace

ElementSystem element_galerkin(const ElementMap& map, const CoefficientField& coeff,
                               const ElementBasisTable& table) {
  const int n = table.nodes;
  const int dim = table.dim;
  ElementSystem es;
  es.fields = 1;
  es.nodes = n;
  es.matrix = Eigen::MatrixXd::Zero(n, n);
  es.vector = Eigen::VectorXd::Zero(n);
  QuadPoint qp;
  for (int q = 0; q < table.points(); ++q) {
    eval_point(map, table, q, qp);
    const double alpha = coeff.alpha(qp.x);
    const Eigen::Matrix2d d = coeff.diffusivity(qp.x);
    if (alpha != 0.0) es.matrix.noalias() += (qp.wdet * alpha) * qp.psi * qp.psi.transpose();
    if (dim == 1) {
      es.matrix.noalias() += (qp.wdet * d(0, 0)) * qp.grad * qp.grad.transpose();
    } else {
      const Eigen::MatrixXd gd = qp.grad * (qp.wdet * d);
      es.matrix.noalias() += gd * qp.grad.transpose();
    }
    const double f = coeff.forcing(qp.x);
    if (f != 0.0) es.vector.noalias() += (qp.wdet * f) * qp.psi;
  }
  symmetrize(es.matrix);
  return es;
}

ElementSystem element_galerkin(const ElementMap& map, const CoefficientField& coeff,
                               const SpectralBasis& basis, const QuadratureRule& rule) {
  return element_galerkin(map, coeff, make_basis_table(basis, rule, map.dim()));
}

ElementSystem element_ls(const ElementMap& map, const CoefficientField& coeff,
                         const ElementBasisTable& table, const Formulation& form) {
  if (!form.least_squares()) fail(ErrorKind::InvalidArgument, "element_ls: formulation must be ls1 or ls2");
  const int n = table.nodes;
  const int dim = table.dim;
  const int nf = 1 + dim;
  const int rows_per_point = 1 + dim;
  const int nq = table.points();

  // Stacked weighted residual operators; K = B^T B and F = B^T r.
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rows_per_point * nq, nf * n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(rows_per_point * nq);
  QuadPoint qp;
  for (int q = 0; q < nq; ++q) {
    eval_point(map, table, q, qp);
    const double alpha = coeff.alpha(qp.x);
    const Eigen::Matrix2d d = coeff.diffusivity(qp.x);
    const double f = coeff.forcing(qp.x);
    const double sw = std::sqrt(qp.wdet);
    const double beta = std::sqrt(form.beta_squared(alpha));
    const int row = q * rows_per_point;

    // beta (alpha c + div q - f)
    b.block(row, 0, 1, n) = (sw * beta * alpha) * qp.psi.transpose();
    for (int a = 0; a < dim; ++a) {
      b.block(row, (1 + a) * n, 1, n) = (sw * beta) * qp.grad.col(a).transpose();
    }
    r(row) = sw * beta * f;

    // A (q + D grad c)
    const Eigen::Matrix2d aw = form.weight(d, dim);
    if (dim == 1) {
      b.block(row + 1, 0, 1, n) = (sw * aw(0, 0) * d(0, 0)) * qp.grad.col(0).transpose();
      b.block(row + 1, n, 1, n) = (sw * aw(0, 0)) * qp.psi.transpose();
    } else {
      const Eigen::Matrix2d ad = aw * d;
      for (int s = 0; s < 2; ++s) {
        b.block(row + 1 + s, 0, 1, n) =
            sw * (ad(s, 0) * qp.grad.col(0) + ad(s, 1) * qp.grad.col(1)).transpose();
        for (int a = 0; a < 2; ++a) {
          b.block(row + 1 + s, (1 + a) * n, 1, n) = (sw * aw(s, a)) * qp.psi.transpose();
        }
      }
    }
  }

  ElementSystem es;
  es.fields = nf;
  es.nodes = n;
  es.matrix = Eigen::MatrixXd::Zero(nf * n, nf * n);
  es.matrix.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
  es.matrix.triangularView<Eigen::StrictlyUpper>() = es.matrix.transpose();
  es.vector = b.transpose() * r;
  return es;
}

ElementSystem element_ls(const ElementMap& map, const CoefficientField& coeff,
                         const SpectralBasis& basis, const QuadratureRule& rule,
                         const Formulation& form) {
  return element_ls(map, coeff, make_basis_table(basis, rule, map.dim()), form);
}

namespace {

enum class VoigtVariant { LS1, LS2 };

ElementSystem element_voigt(const ElementMap& map, const CoefficientField& coeff,
                            const SpectralBasis& basis, const QuadratureRule& rule,
                            VoigtVariant variant) {
  if (map.dim() != 2) fail(ErrorKind::InvalidArgument, "Voigt kernels are two-dimensional only");
  const ElementBasisTable table = make_basis_table(basis, rule, 2);
  const int n = table.nodes;
  Eigen::MatrixXd k11 = Eigen::MatrixXd::Zero(n, n), k12 = k11, k13 = k11, k22 = k11, k23 = k11, k33 = k11;
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(n), f2 = f1, f3 = f1;

  QuadPoint qp;
  for (int q = 0; q < table.points(); ++q) {
    eval_point(map, table, q, qp);
    const double w = qp.wdet;
    const double alpha = coeff.alpha(qp.x);
    const Eigen::Matrix2d d = coeff.diffusivity(qp.x);
    const double f = coeff.forcing(qp.x);
    const double dxx = d(0, 0), dxy = d(0, 1), dyy = d(1, 1);
    const Eigen::VectorXd& psi = qp.psi;
    const Eigen::VectorXd px = qp.grad.col(0);
    const Eigen::VectorXd py = qp.grad.col(1);

    // S^{ab}_{ij} = (a-th factor of psi_i) (b-th factor of psi_j), with
    // factor 0 = psi, 1 = d/dx, 2 = d/dy.
    const Eigen::MatrixXd s00 = psi * psi.transpose();
    const Eigen::MatrixXd s11 = px * px.transpose();
    const Eigen::MatrixXd s22 = py * py.transpose();
    const Eigen::MatrixXd s12 = px * py.transpose();
    const Eigen::MatrixXd s21 = s12.transpose();
    const Eigen::MatrixXd s01 = psi * px.transpose();
    const Eigen::MatrixXd s10 = s01.transpose();
    const Eigen::MatrixXd s02 = psi * py.transpose();
    const Eigen::MatrixXd s20 = s02.transpose();

    if (variant == VoigtVariant::LS1) {
      const double dxy_tilde = dxy * (dxx + dyy);
      k11 += w * (alpha * alpha * s00 + (dxy * dxy + dxx * dxx) * s11 +
                  (dxy * dxy + dyy * dyy) * s22 + dxy_tilde * (s12 + s21));
      k12 += w * (alpha * s01 + dxx * s10 + dxy * s20);
      k13 += w * (alpha * s02 + dxy * s10 + dyy * s20);
      k22 += w * (s00 + s11);
      k23 += w * s12;
      k33 += w * (s00 + s22);
    } else {
      const Eigen::Matrix2d m = d_inv_sqrt(d);
      const Eigen::Matrix2d dinv = m * m;
      k11 += w * (alpha * alpha * s00 + dxx * s11 + dyy * s22 + dxy * (s12 + s21));
      k12 += w * (alpha * s01 + s10);
      k13 += w * (alpha * s02 + s20);
      k22 += w * (s11 + dinv(0, 0) * s00);
      k23 += w * (s12 + dinv(0, 1) * s00);
      k33 += w * (s22 + dinv(1, 1) * s00);
    }
    f1 += (w * alpha * f) * psi;
    f2 += (w * f) * px;
    f3 += (w * f) * py;
  }

  ElementSystem es;
  es.fields = 3;
  es.nodes = n;
  es.matrix.resize(3 * n, 3 * n);
  es.matrix << k11, k12, k13,
               k12.transpose(), k22, k23,
               k13.transpose(), k23.transpose(), k33;
  symmetrize(es.matrix);
  es.vector.resize(3 * n);
  es.vector << f1, f2, f3;
  return es;
}

}  // namespace

ElementSystem element_ls1_voigt(const ElementMap& map, const CoefficientField& coeff,
                                const SpectralBasis& basis, const QuadratureRule& rule) {
  return element_voigt(map, coeff, basis, rule, VoigtVariant::LS1);
}

ElementSystem element_ls2_voigt(const ElementMap& map, const CoefficientField& coeff,
                                const SpectralBasis& basis, const QuadratureRule& rule) {
  return element_voigt(map, coeff, basis, rule, VoigtVariant::LS2);
}

double element_discrepancy(const ElementSystem& a, const ElementSystem& b) {
  if (a.matrix.rows() != b.matrix.rows() || a.vector.size() != b.vector.size()) {
    fail(ErrorKind::InvalidArgument, "element_discrepancy: size mismatch");
  }
  const double scale = std::max({1.0, a.matrix.cwiseAbs().maxCoeff(), a.vector.cwiseAbs().maxCoeff()});
  const double dk = (a.matrix - b.matrix).cwiseAbs().maxCoeff();
  const double df = a.vector.size() ? (a.vector - b.vector).cwiseAbs().maxCoeff() : 0.0;
  return std::max(dk, df) / scale;
}

// ---------------------------------------------------------------------------
// Sparse storage

double SparseMatrix::coeff(int i, int j) const {
  const auto b = cols.begin() + row_ptr[static_cast<std::size_t>(i)];
  const auto e = cols.begin() + row_ptr[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return vals[static_cast<std::size_t>(it - cols.begin())];
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      s += vals[static_cast<std::size_t>(k)] * x(cols[static_cast<std::size_t>(k)]);
    }
    y(i) = s;
  }
  return y;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : vals) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int k = row_ptr[static_cast<std::size_t>(i)]; k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = cols[static_cast<std::size_t>(k)];
      m = std::max(m, std::abs(vals[static_cast<std::size_t>(k)] - coeff(j, i)));
    }
  }
  return m;
}

namespace {

/// Node-graph pattern expanded to `fields` unknowns per node.
SparseMatrix build_pattern(const DofMap& dm, int fields) {
  const auto nn = static_cast<std::size_t>(dm.num_nodes);
  std::vector<std::vector<int>> adj(nn);
  const int ne = static_cast<int>(dm.element_nodes.size()) / dm.nodes_per_element;
  for (int e = 0; e < ne; ++e) {
    const auto ids = dm.element(e);
    for (int a : ids) {
      auto& row = adj[static_cast<std::size_t>(a)];
      row.insert(row.end(), ids.begin(), ids.end());
    }
  }
  SparseMatrix m;
  m.rows = dm.num_nodes * fields;
  m.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
  std::size_t nnz = 0;
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    nnz += row.size() * static_cast<std::size_t>(fields * fields);
  }
  m.cols.reserve(nnz);
  for (std::size_t a = 0; a < nn; ++a) {
    for (int f = 0; f < fields; ++f) {
      for (int b : adj[a]) {
        for (int g = 0; g < fields; ++g) m.cols.push_back(b * fields + g);
      }
      m.row_ptr[a * static_cast<std::size_t>(fields) + static_cast<std::size_t>(f) + 1] =
          static_cast<int>(m.cols.size());
    }
  }
  m.vals.assign(m.cols.size(), 0.0);
  return m;
}

void scatter(SparseMatrix& m, Eigen::VectorXd& rhs, const ElementSystem& es,
             std::span<const int> nodes, int fields) {
  const int n = es.nodes;
  std::vector<int> global(static_cast<std::size_t>(fields * n));
  for (int f = 0; f < fields; ++f) {
    for (int i = 0; i < n; ++i) {
      global[static_cast<std::size_t>(f * n + i)] = nodes[static_cast<std::size_t>(i)] * fields + f;
    }
  }
  // Visit local columns in ascending global order so each row is one merge.
  std::vector<int> order(global.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return global[static_cast<std::size_t>(a)] < global[static_cast<std::size_t>(b)];
  });

  for (std::size_t lr = 0; lr < global.size(); ++lr) {
    const int gr = global[lr];
    rhs(gr) += es.vector(static_cast<Eigen::Index>(lr));
    auto pos = static_cast<std::size_t>(m.row_ptr[static_cast<std::size_t>(gr)]);
    const auto end = static_cast<std::size_t>(m.row_ptr[static_cast<std::size_t>(gr) + 1]);
    for (int lc : order) {
      const int gc = global[static_cast<std::size_t>(lc)];
      while (pos < end && m.cols[pos] < gc) ++pos;
      if (pos == end || m.cols[pos] != gc) fail(ErrorKind::Internal, "scatter: DOF outside sparsity pattern");
      m.vals[pos] += es.matrix(static_cast<Eigen::Index>(lr), lc);
    }
  }
}

void add_ls_neumann_matrix(ElementSystem& es, const ElementMap& map, const SpectralBasis& basis,
                           const QuadratureRule& rule, int dim, int edge) {
  const int n = es.nodes;
  if (dim == 1) {
    const int local = edge == 0 ? 0 : basis.order();
    es.matrix(n + local, n + local) += 1.0;  // (n q)^2 with |n| = 1
    return;
  }
  const int m = basis.size();
  const auto locals = edge_local_nodes(2, basis.order(), edge);
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int q = 0; q < rule.count(); ++q) {
    const double s = rule.points[static_cast<std::size_t>(q)];
    basis.evaluate(s, v, {});
    const auto [nrm, len] = edge_frame(map, edge, s);
    const double w = rule.weights[static_cast<std::size_t>(q)] * len;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const double vv = w * v[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(b)];
        const int ia = locals[static_cast<std::size_t>(a)], ib = locals[static_cast<std::size_t>(b)];
        for (int fa = 0; fa < 2; ++fa) {
          for (int fb = 0; fb < 2; ++fb) {
            es.matrix((1 + fa) * n + ia, (1 + fb) * n + ib) += vv * nrm(fa) * nrm(fb);
          }
        }
      }
    }
  }
}

}  // namespace

AssembledSystem assemble_global(const Mesh& mesh, const CoefficientField& coeff,
                                const SpectralBasis& basis, const Formulation& form,
                                const QuadratureRule& rule, const AssemblyOptions& options) {
  require_full_integration(rule, basis.order());
  auto dm = std::make_shared<DofMap>(build_dof_map(mesh, basis.order()));

  AssembledSystem sys;
  sys.formulation = form.kind;
  sys.dim = mesh.dim;
  sys.order = basis.order();
  sys.fields = fields_per_node(form.kind, mesh.dim);
  sys.matrix = build_pattern(*dm, sys.fields);
  sys.rhs = Eigen::VectorXd::Zero(sys.matrix.rows);

  const bool voigt = options.kernel == ElementKernel::Voigt && form.least_squares() && mesh.dim == 2;
  auto log = options.log ? options.log : [](const std::string& line) { std::clog << line << '\n'; };

  std::vector<std::vector<int>> neumann_edges(static_cast<std::size_t>(mesh.num_elements()));
  for (const auto& be : mesh.boundary) {
    if (be.tag == BoundaryTag::Neumann) neumann_edges[static_cast<std::size_t>(be.element)].push_back(be.local_edge);
  }

  const ElementBasisTable table = make_basis_table(basis, rule, mesh.dim);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap map(mesh, e);
    ElementSystem es;
    if (!form.least_squares()) {
      es = element_galerkin(map, coeff, table);
    } else {
      es = element_ls(map, coeff, table, form);
      if (voigt) {
        ElementSystem fast = form.kind == FormulationKind::LS1
                                 ? element_ls1_voigt(map, coeff, basis, rule)
                                 : element_ls2_voigt(map, coeff, basis, rule);
        const double gap = element_discrepancy(es, fast);
        if (gap <= options.voigt_tolerance) {
          es = std::move(fast);
        } else {
          ++sys.voigt_fallbacks;
          std::ostringstream msg;
          msg << "voigt kernel (" << to_string(form.kind) << ") differs from variational kernel on element "
              << e << " by " << gap << "; using variational";
          log(msg.str());
        }
      }
      for (int edge : neumann_edges[static_cast<std::size_t>(e)]) {
        add_ls_neumann_matrix(es, map, basis, rule, mesh.dim, edge);
      }
    }
    scatter(sys.matrix, sys.rhs, es, dm->element(e), sys.fields);
  }
  sys.dofs = std::move(dm);
  return sys;
}

AssembledSystem neumann_load(AssembledSystem system, const Mesh& mesh, const BoundaryData& boundary,
                             const SpectralBasis& basis, const QuadratureRule& rule) {
  if (!boundary.neumann) return system;
  const DofMap& dm = *system.dofs;
  const bool ls = system.formulation != FormulationKind::Galerkin;
  const int m = basis.size();
  std::vector<double> v(static_cast<std::size_t>(m));

  for (const auto& be : mesh.boundary) {
    if (be.tag != BoundaryTag::Neumann) continue;
    const ElementMap map(mesh, be.element);
    const auto ids = dm.element(be.element);
    const auto locals = edge_local_nodes(mesh.dim, basis.order(), be.local_edge);

    if (mesh.dim == 1) {
      const int node = ids[static_cast<std::size_t>(locals[0])];
      const double n = be.local_edge == 0 ? -1.0 : 1.0;
      const double tp = boundary.neumann(dm.node_coords[static_cast<std::size_t>(node)]);
      if (ls) system.rhs(system.dof(node, 1)) -= n * tp;
      else system.rhs(system.dof(node, 0)) += tp;
      continue;
    }
    for (int q = 0; q < rule.count(); ++q) {
      const double s = rule.points[static_cast<std::size_t>(q)];
      basis.evaluate(s, v, {});
      const auto a = edge_point(be.local_edge, s);
      const auto [nrm, len] = edge_frame(map, be.local_edge, s);
      const double w = rule.weights[static_cast<std::size_t>(q)] * len;
      const double tp = boundary.neumann(map.point(a[0], a[1]));
      for (int i = 0; i < m; ++i) {
        const int node = ids[static_cast<std::size_t>(locals[static_cast<std::size_t>(i)])];
        const double wv = w * v[static_cast<std::size_t>(i)] * tp;
        if (ls) {
          system.rhs(system.dof(node, 1)) -= wv * nrm.x();
          system.rhs(system.dof(node, 2)) -= wv * nrm.y();
        } else {
          system.rhs(system.dof(node, 0)) += wv;
        }
      }
    }
  }
  return system;
}

AssembledSystem apply_dirichlet(AssembledSystem system, const BoundaryData& boundary) {
  const DofMap& dm = *system.dofs;
  std::vector<Constraint> cons;
  for (const auto& bn : dm.boundary_nodes) {
    if (bn.tag != BoundaryTag::Dirichlet) continue;
    cons.push_back({system.dof(bn.node, 0),
                    boundary.dirichlet(dm.node_coords[static_cast<std::size_t>(bn.node)], bn.region)});
  }
  return apply_constraints(std::move(system), std::move(cons));
}

AssembledSystem apply_constraints(AssembledSystem system, std::vector<Constraint> constraints) {
  const int n = system.size();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  std::vector<double> value(static_cast<std::size_t>(n), 0.0);
  for (const auto& c : constraints) {
    if (c.dof < 0 || c.dof >= n) fail(ErrorKind::Internal, "apply_constraints: DOF out of range");
    fixed[static_cast<std::size_t>(c.dof)] = 1;
    value[static_cast<std::size_t>(c.dof)] = c.value;
  }

  SparseMatrix& a = system.matrix;
  SparseMatrix out;
  out.rows = n;
  out.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  out.cols.reserve(a.cols.size());
  out.vals.reserve(a.vals.size());
  for (int i = 0; i < n; ++i) {
    const bool fi = fixed[static_cast<std::size_t>(i)];
    for (int k = a.row_ptr[static_cast<std::size_t>(i)]; k < a.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = a.cols[static_cast<std::size_t>(k)];
      const double v = a.vals[static_cast<std::size_t>(k)];
      const bool fj = fixed[static_cast<std::size_t>(j)];
      if (fi) {
        if (j == i) {
          out.cols.push_back(j);
          out.vals.push_back(1.0);
        }
        continue;
      }
      if (fj) {
        system.rhs(i) -= v * value[static_cast<std::size_t>(j)];
        continue;
      }
      out.cols.push_back(j);
      out.vals.push_back(v);
    }
    if (fi) system.rhs(i) = value[static_cast<std::size_t>(i)];
    out.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(out.cols.size());
  }
  system.matrix = std::move(out);

  std::sort(constraints.begin(), constraints.end(),
            [](const Constraint& x, const Constraint& y) { return x.dof < y.dof; });
  for (auto& c : constraints) system.constraints.push_back(c);
  return system;
}

}  // namespace dmpfem
