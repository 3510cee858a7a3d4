#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "dmpfem/error.hpp"
#include "dmpfem/run.hpp"

namespace dmpfem {

namespace {

struct Checker {
  std::ostream& out;
  int failures = 0;

  void run(const std::string& name, const std::function<std::string()>& body) {
    std::string detail;
    bool ok = false;
    try {
      detail = body();
      ok = detail.empty() || detail.front() != '!';
      if (!ok) detail.erase(0, 1);
    } catch (const std::exception& ex) {
      detail = ex.what();
    }
    if (!ok) ++failures;
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << '\n';
  }
};

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

// Result string: a leading '!' marks failure.
std::string verdict(bool ok, const std::string& detail) { return (ok ? "" : "!") + detail; }

double nodal_partition_error(int p) {
  const SpectralBasis& b = shared_basis(p);
  std::vector<double> v(static_cast<std::size_t>(b.size())), d(v.size());
  double worst = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double xi = -1.0 + 2.0 * k / 40.0;
    b.evaluate(xi, v, d);
    double sv = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      sv += v[i];
      sd += d[i];
    }
    worst = std::max({worst, std::abs(sv - 1.0), std::abs(sd) / (p * p)});
  }
  return worst;
}

}  // namespace

bool run_verification(std::ostream& out) {
  Checker c{out};

  c.run("basis: partition of unity, p = 1..20", [] {
    double worst = 0.0;
    for (int p = 1; p <= 20; ++p) worst = std::max(worst, nodal_partition_error(p));
    return verdict(worst < 1e-12, "max defect " + sci(worst));
  });

  c.run("basis: cardinality at the nodes, p = 1..20", [] {
    double worst = 0.0;
    for (int p = 1; p <= 20; ++p) {
      const SpectralBasis& b = shared_basis(p);
      std::vector<double> v(static_cast<std::size_t>(b.size()));
      for (int j = 0; j < b.size(); ++j) {
        b.evaluate(b.nodes()[static_cast<std::size_t>(j)], v, {});
        for (int i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(v[static_cast<std::size_t>(i)] - (i == j)));
      }
    }
    return verdict(worst < 1e-13, "max defect " + sci(worst));
  });

  c.run("quadrature: Gauss rules exact to degree 2n-1, n = 1..32", [] {
    double worst = 0.0;
    for (int n = 1; n <= kMaxGaussPoints; ++n) {
      const QuadratureRule r = gauss_rule(n);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += r.weights[static_cast<std::size_t>(i)] * std::pow(r.points[static_cast<std::size_t>(i)], k);
        const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
        worst = std::max(worst, std::abs(s - exact));
      }
    }
    return verdict(worst < 1e-13, "max error " + sci(worst));
  });

  c.run("problems: canonical meshes have positive Jacobians", [] {
    double worst = 1e300;
    for (const auto& id : canonical_problem_ids()) {
      const ProblemSpec spec = canonical_problem(id);
      worst = std::min(worst, min_jacobian(build_mesh(spec.mesh)));
    }
    return verdict(worst > 0.0, "smallest det J " + sci(worst));
  });

  c.run("problems: decay solution satisfies alpha c - c'' = 0", [] {
    const double alpha = 1e4, h = 1e-5;
    double worst = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double x = k / 100.0;
      const double cpp = (analytic_decay1d(alpha, x + h) - 2 * analytic_decay1d(alpha, x) +
                          analytic_decay1d(alpha, x - h)) / (h * h);
      worst = std::max(worst, std::abs(alpha * analytic_decay1d(alpha, x) - cpp));
    }
    return verdict(worst < 1e-6 * alpha * 10.0, "max residual " + sci(worst));
  });

  for (const auto kind : {FormulationKind::Galerkin, FormulationKind::LS1, FormulationKind::LS2}) {
    c.run(std::string("assembly: ") + to_string(kind) + " system is symmetric on burman_ern p=3", [kind] {
      const ProblemSpec spec = canonical_problem("burman_ern");
      DiscretizationOptions opt;
      opt.formulation = kind;
      opt.order = 3;
      const AssembledSystem sys = build_system(spec, build_mesh(spec.mesh), opt);
      const double asym = sys.matrix.asymmetry() / sys.matrix.max_abs();
      return verdict(asym < 1e-14, "relative asymmetry " + sci(asym));
    });
  }

  c.run("assembly: closed-form LS1 kernel matches the variational kernel", [] {
    CoefficientField coeff;
    coeff.alpha = [](const Point&) { return 2.0; };
    coeff.diffusivity = [](const Point&) { return rotated_diffusivity(1.0, 7.0, 0.4); };
    coeff.forcing = [](const Point&) { return 1.0; };
    Mesh mesh = build_rect_mesh(0.0, 0.0, 1.0, 0.5, 1, 1);
    const ElementMap map(mesh, 0);
    const SpectralBasis& b = shared_basis(4);
    const QuadratureRule rule = gauss_rule(6);
    const double d = element_discrepancy(element_ls(map, coeff, b, rule, Formulation{FormulationKind::LS1}),
                                         element_ls1_voigt(map, coeff, b, rule));
    return verdict(d < 1e-10, "discrepancy " + sci(d));
  });

  c.run("solver: Cholesky and CG agree on burman_ern ls1 p=2", [] {
    const ProblemSpec spec = canonical_problem("burman_ern");
    DiscretizationOptions opt;
    opt.formulation = FormulationKind::LS1;
    opt.order = 2;
    const AssembledSystem sys = build_system(spec, build_mesh(spec.mesh), opt);
    SolverOptions direct, iterative;
    direct.method = SolverMethod::Direct;
    iterative.method = SolverMethod::Iterative;
    const auto [xd, rd] = solve_spd(sys, direct);
    const auto [xi, ri] = solve_spd(sys, iterative);
    const double diff = (xd - xi).norm() / xd.norm();
    return verdict(diff < 1e-8 && rd.relative_residual < 1e-10 && ri.relative_residual < 1e-10,
                   "relative difference " + sci(diff));
  });

  c.run("analysis: decay1d single-field p=10 is non-negative and accurate", [] {
    const ProblemSpec spec = canonical_problem("decay1d");
    auto mesh = std::make_shared<const Mesh>(build_mesh(spec.mesh));
    DiscretizationOptions opt;
    opt.order = 10;
    const SolveResult res = solve_problem(spec, mesh, opt);
    DmpReport rep = scan_extrema(res.solution);
    rep.verdicts = audit_dmp(rep, spec);
    const ErrorNorms e = error_norms(res.solution, spec.analytic);
    return verdict(rep.verdicts.nonneg == Verdict::Ok && e.linf < 1e-4,
                   "min " + sci(rep.min_value) + ", max error " + sci(e.linf));
  });

  c.run("analysis: density-16 scan and visualisation samples share extrema (burman_ern p=4)", [] {
    const ProblemSpec spec = canonical_problem("burman_ern");
    auto mesh = std::make_shared<const Mesh>(build_mesh(spec.mesh));
    DiscretizationOptions opt;
    opt.order = 4;
    const SolveResult res = solve_problem(spec, mesh, opt);
    const DmpReport rep = scan_extrema(res.solution, 16);
    const VizMesh viz = build_viz(res.solution);
    double lo = res.solution.concentration.minCoeff(), hi = res.solution.concentration.maxCoeff();
    for (double v : viz.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return verdict(lo == rep.min_value && hi == rep.max_value, "scan min " + sci(rep.min_value) + ", viz min " + sci(lo));
  });

  c.run("export: sweep CSV round-trips", [] {
    SweepTable t;
    t.rows.push_back({1, FormulationKind::LS2, 1, 120, -0.1 / 3.0, Point(0.1, 0.7)});
    t.rows.push_back({2, FormulationKind::Galerkin, 2, 120, 0.0, Point(1.0 / 3.0, 0.0)});
    std::stringstream s;
    write_csv(t, s);
    return verdict(read_sweep_csv(s, SweepMode::P) == t, "");
  });

  c.run("cli: run config JSON round-trips", [] {
    RunConfig cfg;
    cfg.problem = "hole";
    cfg.k2 = 1e4;
    cfg.jitter_amplitude = 0.2;
    cfg.jitter_seed = 0xFFFFFFFFFFFFFFFFull;
    cfg.sweep_formulations = {"ls1", "ls2"};
    return verdict(run_config_from_json(run_config_json(cfg)) == cfg, "");
  });

  out << (c.failures == 0 ? "all checks passed" : std::to_string(c.failures) + " check(s) failed") << '\n';
  return c.failures == 0;
}

}  // namespace dmpfem
