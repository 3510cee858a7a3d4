#include "dmpfem/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "dmpfem/error.hpp"
#include "dmpfem/quadrature.hpp"

namespace dmpfem {

Eigen::VectorXd FieldSolution::dof_vector() const {
  const int nf = 1 + (has_flux() ? dim() : 0);
  const auto n = concentration.size();
  Eigen::VectorXd x(n * nf);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i * nf) = concentration(i);
    for (int a = 1; a < nf; ++a) x(i * nf + a) = flux(i, a - 1);
  }
  return x;
}

FieldSolution make_solution(const AssembledSystem& system, std::shared_ptr<const Mesh> mesh,
                            const Eigen::VectorXd& x) {
  if (x.size() != system.size()) fail(ErrorKind::InvalidArgument, "make_solution: DOF vector size mismatch");
  Eigen::VectorXd fixed = x;
  for (const auto& c : system.constraints) fixed(c.dof) = c.value;

  FieldSolution sol;
  sol.mesh = std::move(mesh);
  sol.dofs = system.dofs;
  sol.order = system.order;
  sol.formulation = system.formulation;
  const int nn = system.dofs->num_nodes;
  const int nf = system.fields;
  sol.concentration.resize(nn);
  if (nf > 1) sol.flux.resize(nn, nf - 1);
  for (int i = 0; i < nn; ++i) {
    sol.concentration(i) = fixed(i * nf);
    for (int a = 1; a < nf; ++a) sol.flux(i, a - 1) = fixed(i * nf + a);
  }
  return sol;
}

namespace {

/// Values of the p+1 interpolants at each of `pts`: result(j, a) = l_j(pts[a]).
Eigen::MatrixXd interp_table(const SpectralBasis& basis, std::span<const double> pts,
                             Eigen::MatrixXd* deriv = nullptr) {
  const int m = basis.size();
  Eigen::MatrixXd t(m, static_cast<Eigen::Index>(pts.size()));
  if (deriv) deriv->resize(m, t.cols());
  std::vector<double> v(static_cast<std::size_t>(m)), d(static_cast<std::size_t>(m));
  for (std::size_t a = 0; a < pts.size(); ++a) {
    basis.evaluate(pts[a], v, deriv ? std::span<double>(d) : std::span<double>());
    for (int j = 0; j < m; ++j) {
      t(j, static_cast<Eigen::Index>(a)) = v[static_cast<std::size_t>(j)];
      if (deriv) (*deriv)(j, static_cast<Eigen::Index>(a)) = d[static_cast<std::size_t>(j)];
    }
  }
  return t;
}

/// Nodal coefficients of element e arranged as an m x m matrix (xi index
/// first), or m x 1 in 1D.
Eigen::MatrixXd element_coefficients(const FieldSolution& sol, const Eigen::VectorXd& nodal, int e) {
  const int m = sol.order + 1;
  const auto ids = sol.dofs->element(e);
  if (sol.dim() == 1) {
    Eigen::MatrixXd u(m, 1);
    for (int j = 0; j < m; ++j) u(j, 0) = nodal(ids[static_cast<std::size_t>(j)]);
    return u;
  }
  Eigen::MatrixXd u(m, m);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) u(j, k) = nodal(ids[static_cast<std::size_t>(j + k * m)]);
  }
  return u;
}

/// Physical-space quantities of a field at the quadrature points of one element.
struct PointData {
  Point x;
  double w = 0.0;  // weight * det J
  double c = 0.0;
  Point grad_c = Point::Zero();
  Point q = Point::Zero();
  double div_q = 0.0;
};

std::vector<PointData> element_point_data(const FieldSolution& sol, const ElementBasisTable& t, int e) {
  const ElementMap map(*sol.mesh, e);
  const auto ids = sol.dofs->element(e);
  const int n = t.nodes;
  const int dim = sol.dim();
  Eigen::VectorXd c(n);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, 2);
  for (int i = 0; i < n; ++i) {
    const int g = ids[static_cast<std::size_t>(i)];
    c(i) = sol.concentration(g);
    if (sol.has_flux()) {
      for (int a = 0; a < dim; ++a) q(i, a) = sol.flux(g, a);
    }
  }
  std::vector<PointData> out(static_cast<std::size_t>(t.points()));
  for (int k = 0; k < t.points(); ++k) {
    const double xi = t.xi[static_cast<std::size_t>(k)], eta = t.eta[static_cast<std::size_t>(k)];
    const Eigen::Matrix2d jac = map.jacobian(xi, eta);
    PointData& pd = out[static_cast<std::size_t>(k)];
    pd.x = map.point(xi, eta);
    pd.w = t.weight[static_cast<std::size_t>(k)] * jac.determinant();
    pd.c = t.values.col(k).dot(c);
    const Eigen::VectorXd v = t.values.col(k);
    if (dim == 1) {
      const Eigen::VectorXd g = t.dxi.col(k) / jac(0, 0);
      pd.grad_c = Point(g.dot(c), 0.0);
      pd.q = Point(v.dot(q.col(0)), 0.0);
      pd.div_q = g.dot(q.col(0));
    } else {
      const Eigen::Matrix2d jit = jac.inverse().transpose();
      const Eigen::VectorXd gx = jit(0, 0) * t.dxi.col(k) + jit(0, 1) * t.deta.col(k);
      const Eigen::VectorXd gy = jit(1, 0) * t.dxi.col(k) + jit(1, 1) * t.deta.col(k);
      pd.grad_c = Point(gx.dot(c), gy.dot(c));
      pd.q = Point(v.dot(q.col(0)), v.dot(q.col(1)));
      pd.div_q = gx.dot(q.col(0)) + gy.dot(q.col(1));
    }
  }
  return out;
}

/// Visits (physical point, outward normal, weight, c, q) along every Neumann edge.
template <typename Visit>
void for_each_neumann_point(const FieldSolution& sol, const QuadratureRule& rule, Visit&& visit) {
  const Mesh& mesh = *sol.mesh;
  const SpectralBasis& basis = shared_basis(sol.order);
  for (const auto& be : mesh.boundary) {
    if (be.tag != BoundaryTag::Neumann) continue;
    const ElementMap map(mesh, be.element);
    const auto ids = sol.dofs->element(be.element);
    const auto locals = edge_local_nodes(mesh.dim, sol.order, be.local_edge);
    auto flux_at = [&](int node) {
      if (!sol.has_flux()) return Point(Point::Zero());
      return mesh.dim == 1 ? Point(sol.flux(node, 0), 0.0) : Point(sol.flux(node, 0), sol.flux(node, 1));
    };
    if (mesh.dim == 1) {
      const int node = ids[static_cast<std::size_t>(locals[0])];
      const Point n(be.local_edge == 0 ? -1.0 : 1.0, 0.0);
      visit(sol.dofs->node_coords[static_cast<std::size_t>(node)], n, 1.0, sol.concentration(node), flux_at(node));
      continue;
    }
    std::vector<double> v(static_cast<std::size_t>(basis.size()));
    for (int k = 0; k < rule.count(); ++k) {
      const double s = rule.points[static_cast<std::size_t>(k)];
      basis.evaluate(s, v, {});
      const auto a = edge_point(be.local_edge, s);
      const EdgeFrame fr = edge_frame(map, be.local_edge, s);
      double c = 0.0;
      Point q = Point::Zero();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const int node = ids[static_cast<std::size_t>(locals[i])];
        c += v[i] * sol.concentration(node);
        q += v[i] * flux_at(node);
      }
      visit(map.point(a[0], a[1]), fr.normal, rule.weights[static_cast<std::size_t>(k)] * fr.line_factor, c, q);
    }
  }
}

int functional_ngp(const FieldSolution& sol, const ProblemSpec& problem, int ngp) {
  if (ngp > 0) return ngp;
  return default_ngp(sol.formulation, sol.order, problem.coeff.variable_coefficients);
}

}  // namespace

Eigen::MatrixXd element_grid_values(const FieldSolution& sol, const Eigen::VectorXd& nodal, int element,
                                    std::span<const double> xs, std::span<const double> ys) {
  if (element < 0 || element >= sol.mesh->num_elements()) {
    fail(ErrorKind::InvalidArgument, "element index out of range");
  }
  const SpectralBasis& basis = shared_basis(sol.order);
  const Eigen::MatrixXd u = element_coefficients(sol, nodal, element);
  const Eigen::MatrixXd bx = interp_table(basis, xs);
  const int m = basis.size();
  const auto na = static_cast<Eigen::Index>(xs.size());
  // Plain loops with a fixed summation order keep results independent of
  // batch size.
  Eigen::MatrixXd t(na, u.cols());
  for (Eigen::Index a = 0; a < na; ++a) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += bx(j, a) * u(j, k);
      t(a, k) = s;
    }
  }
  if (sol.dim() == 1) return t;
  const Eigen::MatrixXd by = interp_table(basis, ys);
  const auto nb = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd v(na, nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    for (Eigen::Index a = 0; a < na; ++a) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += t(a, k) * by(k, b);
      v(a, b) = s;
    }
  }
  return v;
}

double evaluate(const FieldSolution& sol, int element, double xi, double eta) {
  const double px[1] = {xi}, py[1] = {eta};
  return element_grid_values(sol, sol.concentration, element, px, py)(0, 0);
}

Point evaluate_flux(const FieldSolution& sol, int element, double xi, double eta) {
  if (!sol.has_flux()) return Point::Zero();
  Point q = Point::Zero();
  for (int a = 0; a < sol.dim(); ++a) {
    const double px[1] = {xi}, py[1] = {eta};
    q(a) = element_grid_values(sol, sol.flux.col(a), element, px, py)(0, 0);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Solve pipeline

int resolved_ngp(const ProblemSpec& problem, const DiscretizationOptions& options) {
  return options.ngp > 0 ? options.ngp
                         : default_ngp(options.formulation, options.order, problem.coeff.variable_coefficients);
}

AssembledSystem build_system(const ProblemSpec& problem, const Mesh& mesh, const DiscretizationOptions& options) {
  if (mesh.dim != problem.dim) fail(ErrorKind::InvalidArgument, "mesh dimension does not match the problem");
  const SpectralBasis& basis = shared_basis(options.order);
  const QuadratureRule rule = gauss_rule(resolved_ngp(problem, options));
  const Formulation form{options.formulation};
  AssemblyOptions aopt;
  aopt.kernel = options.kernel;
  aopt.log = options.log;
  AssembledSystem sys = assemble_global(mesh, problem.coeff, basis, form, rule, aopt);
  sys = neumann_load(std::move(sys), mesh, problem.boundary, basis, rule);
  return apply_dirichlet(std::move(sys), problem.boundary);
}

SolveResult solve_problem(const ProblemSpec& problem, std::shared_ptr<const Mesh> mesh,
                          const DiscretizationOptions& options) {
  const AssembledSystem sys = build_system(problem, *mesh, options);
  auto [x, report] = solve_spd(sys, options.solver);
  SolveResult out;
  out.solution = make_solution(sys, std::move(mesh), x);
  out.report = report;
  out.voigt_fallbacks = sys.voigt_fallbacks;
  return out;
}

// ---------------------------------------------------------------------------
// Extrema and verdicts

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Ok: return "ok";
    case Verdict::Violated: return "violated";
    case Verdict::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

Verdict verdict_from_string(const std::string& name) {
  if (name == "ok") return Verdict::Ok;
  if (name == "violated") return Verdict::Violated;
  if (name == "not_applicable") return Verdict::NotApplicable;
  fail(ErrorKind::InvalidArgument, "unknown verdict '" + name + "'");
}

namespace {

struct ExtremaAccumulator {
  DmpReport r;
  long long negative = 0;

  ExtremaAccumulator() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    r.min_value = r.boundary_min = r.interior_min = inf;
    r.max_value = r.boundary_max = r.interior_max = -inf;
  }

  void add(double v, const Point& x, bool on_boundary) {
    ++r.samples;
    if (v < -kNegativeTolerance) ++negative;
    if (v < r.min_value) {
      r.min_value = v;
      r.min_location = x;
    }
    if (v > r.max_value) {
      r.max_value = v;
      r.max_location = x;
    }
    if (on_boundary) {
      r.boundary_min = std::min(r.boundary_min, v);
      r.boundary_max = std::max(r.boundary_max, v);
    } else {
      r.has_interior = true;
      r.interior_min = std::min(r.interior_min, v);
      r.interior_max = std::max(r.interior_max, v);
    }
  }
};

/// Per-element flags for which local edges lie on the domain boundary.
std::vector<std::array<bool, 4>> boundary_edge_flags(const Mesh& mesh) {
  std::vector<std::array<bool, 4>> flags(static_cast<std::size_t>(mesh.num_elements()), {false, false, false, false});
  for (const auto& be : mesh.boundary) {
    flags[static_cast<std::size_t>(be.element)][static_cast<std::size_t>(be.local_edge)] = true;
  }
  return flags;
}

bool on_boundary_edge(const std::array<bool, 4>& f, int dim, double xi, double eta) {
  if (dim == 1) return (f[0] && xi == -1.0) || (f[1] && xi == 1.0);
  return (f[0] && eta == -1.0) || (f[1] && xi == 1.0) || (f[2] && eta == 1.0) || (f[3] && xi == -1.0);
}

/// Visits every scan sample (value, point, on_boundary) in a fixed order:
/// elements ascending, grid points with xi fastest, then all mesh nodes.
template <typename Visit>
void for_each_scan_sample(const FieldSolution& sol, int density, Visit&& visit) {
  if (density < 2) fail(ErrorKind::InvalidArgument, "scan density must be >= 2");
  const Mesh& mesh = *sol.mesh;
  const SpectralBasis& grid = shared_basis(density - 1);
  const auto g = grid.nodes();
  const auto flags = boundary_edge_flags(mesh);
  const int dim = mesh.dim;

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap map(mesh, e);
    const Eigen::MatrixXd vals = element_grid_values(sol, sol.concentration, e, g, g);
    const auto& f = flags[static_cast<std::size_t>(e)];
    if (dim == 1) {
      for (int a = 0; a < density; ++a) {
        visit(vals(a, 0), map.point(g[static_cast<std::size_t>(a)]), on_boundary_edge(f, 1, g[static_cast<std::size_t>(a)], 0.0));
      }
      continue;
    }
    for (int bi = 0; bi < density; ++bi) {
      for (int a = 0; a < density; ++a) {
        const double xi = g[static_cast<std::size_t>(a)], eta = g[static_cast<std::size_t>(bi)];
        visit(vals(a, bi), map.point(xi, eta), on_boundary_edge(f, 2, xi, eta));
      }
    }
  }

  std::vector<char> bnode(static_cast<std::size_t>(sol.dofs->num_nodes), 0);
  for (const auto& bn : sol.dofs->boundary_nodes) bnode[static_cast<std::size_t>(bn.node)] = 1;
  for (int i = 0; i < sol.dofs->num_nodes; ++i) {
    visit(sol.concentration(i), sol.dofs->node_coords[static_cast<std::size_t>(i)], bnode[static_cast<std::size_t>(i)] != 0);
  }
}

}  // namespace

DmpReport scan_extrema(const FieldSolution& sol, int density) {
  ExtremaAccumulator acc;
  for_each_scan_sample(sol, density, [&](double v, const Point& x, bool b) { acc.add(v, x, b); });
  acc.r.eval_density = density;
  acc.r.negative_fraction = acc.r.samples ? static_cast<double>(acc.negative) / static_cast<double>(acc.r.samples) : 0.0;
  if (!acc.r.has_interior) {
    acc.r.interior_min = acc.r.boundary_min;
    acc.r.interior_max = acc.r.boundary_max;
  }
  return acc.r;
}

Verdicts audit_dmp(const DmpReport& r, const ProblemSpec& problem) {
  Verdicts v;
  const Sign s = problem.coeff.forcing_sign;
  if (s == Sign::Mixed) return v;
  const bool f_nonneg = s == Sign::Zero || s == Sign::NonNegative;
  const bool f_nonpos = s == Sign::Zero || s == Sign::NonPositive;
  auto verdict = [](bool ok) { return ok ? Verdict::Ok : Verdict::Violated; };
  constexpr double tol = kVerdictTolerance;

  if (problem.coeff.alpha_zero) {
    bool ok = true;
    if (f_nonpos) ok = ok && r.interior_max <= r.boundary_max + tol;
    if (f_nonneg) ok = ok && r.interior_min >= r.boundary_min - tol;
    v.mp_diffusion = verdict(ok);
  }
  {
    bool ok = true;
    if (f_nonneg) ok = ok && r.interior_min >= std::min(r.boundary_min, 0.0) - tol;
    if (f_nonpos) ok = ok && r.interior_max <= std::max(r.boundary_max, 0.0) + tol;
    v.mp_decay = verdict(ok);
  }
  const bool flux_free = !problem.boundary.neumann;
  if (f_nonneg && problem.boundary.dirichlet_nonneg && flux_free) {
    v.nonneg = verdict(r.min_value >= -tol);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Norms and functionals

ErrorNorms error_norms(const FieldSolution& sol, const std::function<double(const Point&)>& analytic, int density) {
  if (!analytic) fail(ErrorKind::InvalidArgument, "error_norms: no analytic solution available");
  ErrorNorms out;
  const int ngp = std::min(sol.order + 3, kMaxGaussPoints);
  const ElementBasisTable t = make_basis_table(shared_basis(sol.order), gauss_rule(ngp), sol.dim());
  double sum = 0.0;
  for (int e = 0; e < sol.mesh->num_elements(); ++e) {
    for (const auto& pd : element_point_data(sol, t, e)) {
      const double d = pd.c - analytic(pd.x);
      sum += pd.w * d * d;
    }
  }
  out.l2 = std::sqrt(sum);
  for_each_scan_sample(sol, density, [&](double v, const Point& x, bool) {
    out.linf = std::max(out.linf, std::abs(v - analytic(x)));
  });
  return out;
}

double ls_functional_value(const FieldSolution& sol, const ProblemSpec& problem, const Formulation& form, int ngp) {
  if (!form.least_squares() || !sol.has_flux()) {
    fail(ErrorKind::InvalidArgument, "ls_functional_value needs a least-squares solution with a flux field");
  }
  const int dim = sol.dim();
  const QuadratureRule rule = gauss_rule(functional_ngp(sol, problem, ngp));
  const ElementBasisTable t = make_basis_table(shared_basis(sol.order), rule, dim);
  const CoefficientField& cf = problem.coeff;
  double j = 0.0;
  for (int e = 0; e < sol.mesh->num_elements(); ++e) {
    for (const auto& pd : element_point_data(sol, t, e)) {
      const double alpha = cf.alpha(pd.x);
      Eigen::Matrix2d d = cf.diffusivity(pd.x);
      if (dim == 1) d = Eigen::Vector2d(d(0, 0), 0.0).asDiagonal();
      const double r1 = alpha * pd.c + pd.div_q - cf.forcing(pd.x);
      Point r2 = form.weight(d, dim) * (pd.q + d * pd.grad_c);
      if (dim == 1) r2(1) = 0.0;
      j += pd.w * (form.beta_squared(alpha) * r1 * r1 + r2.squaredNorm());
    }
  }
  for_each_neumann_point(sol, rule, [&](const Point& x, const Point& n, double w, double, const Point& q) {
    const double tp = problem.boundary.neumann ? problem.boundary.neumann(x) : 0.0;
    const double r = q.dot(n) + tp;
    j += w * r * r;
  });
  return 0.5 * j;
}

double galerkin_energy(const FieldSolution& sol, const ProblemSpec& problem, int ngp) {
  const int dim = sol.dim();
  const QuadratureRule rule = gauss_rule(functional_ngp(sol, problem, ngp));
  const ElementBasisTable t = make_basis_table(shared_basis(sol.order), rule, dim);
  const CoefficientField& cf = problem.coeff;
  double quad = 0.0, lin = 0.0;
  for (int e = 0; e < sol.mesh->num_elements(); ++e) {
    for (const auto& pd : element_point_data(sol, t, e)) {
      const Eigen::Matrix2d d = cf.diffusivity(pd.x);
      const double flux = dim == 1 ? d(0, 0) * pd.grad_c(0) * pd.grad_c(0) : pd.grad_c.dot(d * pd.grad_c);
      quad += pd.w * (cf.alpha(pd.x) * pd.c * pd.c + flux);
      lin += pd.w * cf.forcing(pd.x) * pd.c;
    }
  }
  if (problem.boundary.neumann) {
    for_each_neumann_point(sol, rule, [&](const Point& x, const Point&, double w, double c, const Point&) {
      lin += w * problem.boundary.neumann(x) * c;
    });
  }
  return 0.5 * quad - lin;
}

// ---------------------------------------------------------------------------
// Sweeps

const char* to_string(SweepMode mode) noexcept { return mode == SweepMode::P ? "p" : "h"; }

SweepMode sweep_mode_from_string(const std::string& name) {
  if (name == "p") return SweepMode::P;
  if (name == "h") return SweepMode::H;
  fail(ErrorKind::InvalidArgument, "sweep mode must be 'p' or 'h'");
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) fail(ErrorKind::InvalidArgument, "bad level list '" + text + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    if (const auto dots = part.find(".."); dots != std::string::npos) {
      const int a = to_int(part.substr(0, dots)), b = to_int(part.substr(dots + 2));
      if (b < a) fail(ErrorKind::InvalidArgument, "bad level range '" + part + "'");
      for (int i = a; i <= b; ++i) out.push_back(i);
    } else {
      out.push_back(to_int(part));
    }
  }
  if (out.empty()) fail(ErrorKind::InvalidArgument, "level list is empty");
  for (int l : out) {
    if (l < 1) fail(ErrorKind::InvalidArgument, "levels must be >= 1");
  }
  return out;
}

SweepTable sweep(const ProblemSpec& problem, const Mesh& base, FormulationKind formulation,
                 const SweepOptions& options) {
  if (options.levels.empty()) fail(ErrorKind::InvalidArgument, "sweep: no levels requested");
  const std::size_t n = options.levels.size();
  std::vector<std::optional<SweepRow>> rows(n);
  std::vector<std::string> errors(n);

  auto run = [&](std::size_t i) {
    const int level = options.levels[i];
    DiscretizationOptions d = options.discretization;
    d.formulation = formulation;
    std::shared_ptr<const Mesh> mesh;
    if (options.mode == SweepMode::P) {
      d.order = level;
      mesh = std::make_shared<const Mesh>(base);
    } else {
      d.order = options.h_order;
      mesh = std::make_shared<const Mesh>(level == 1 ? base : refine(base, level));
    }
    try {
      const SolveResult res = solve_problem(problem, mesh, d);
      const DmpReport rep = scan_extrema(res.solution, options.density);
      rows[i] = SweepRow{level, formulation, d.order, mesh->num_elements(), rep.min_value, rep.min_location};
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(n)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  SweepTable table;
  table.mode = options.mode;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i]) {
      table.partial = true;
      table.failure = "level " + std::to_string(options.levels[i]) + ": " + errors[i];
      break;
    }
    table.rows.push_back(*rows[i]);
  }
  return table;
}

}  // namespace dmpfem
