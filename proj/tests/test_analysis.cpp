#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dmpfem/error.hpp"
#include "dmpfem/export.hpp"

using namespace dmpfem;

namespace {

SolveResult solve_canonical(const std::string& id, FormulationKind kind, int p, const ProblemParams& params = {},
                            double jitter = 0.0) {
  const ProblemSpec spec = canonical_problem(id, params);
  Mesh mesh = build_mesh(spec.mesh);
  if (jitter > 0.0) mesh = jitter_mesh(mesh, jitter, 42);
  DiscretizationOptions opt;
  opt.formulation = kind;
  opt.order = p;
  return solve_problem(spec, std::make_shared<const Mesh>(std::move(mesh)), opt);
}

double min_of(const std::string& id, FormulationKind kind, int p, const ProblemParams& params = {}, double jitter = 0.0) {
  return scan_extrema(solve_canonical(id, kind, p, params, jitter).solution).min_value;
}

FieldSolution filled(const Mesh& mesh, int p, const std::function<double(const Point&)>& g) {
  FieldSolution s;
  s.mesh = std::make_shared<const Mesh>(mesh);
  s.dofs = std::make_shared<const DofMap>(build_dof_map(mesh, p));
  s.order = p;
  s.concentration.resize(s.dofs->num_nodes);
  for (int i = 0; i < s.dofs->num_nodes; ++i) s.concentration[i] = g(s.dofs->node_coords[i]);
  return s;
}

ProblemSpec constant_problem(double alpha, double f) {
  ProblemSpec p;
  p.dim = 2;
  p.coeff.alpha = [alpha](const Point&) { return alpha; };
  p.coeff.diffusivity = [](const Point&) { return Eigen::Matrix2d::Identity(); };
  p.coeff.forcing = [f](const Point&) { return f; };
  p.coeff.alpha_zero = alpha == 0.0;
  p.coeff.forcing_sign = f > 0 ? Sign::NonNegative : (f < 0 ? Sign::NonPositive : Sign::Zero);
  p.boundary.dirichlet = [](const Point&, int) { return 1.0; };
  return p;
}

// Random perturbation vanishing on constrained DOFs.
Eigen::VectorXd admissible_perturbation(const AssembledSystem& sys, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::VectorXd d(sys.size());
  for (int i = 0; i < sys.size(); ++i) d[i] = n(rng);
  for (const auto& c : sys.constraints) d[c.dof] = 0.0;
  return d;
}

FieldSolution perturbed(const SolveResult& r, const AssembledSystem& sys, const Eigen::VectorXd& delta) {
  return make_solution(sys, r.solution.mesh, r.solution.dof_vector() + delta);
}

}  // namespace

TEST(Evaluate, NodalValuesAndConstants) {
  const SolveResult r = solve_canonical("lepotier", FormulationKind::LS1, 3, {}, 0.2);
  const FieldSolution& s = r.solution;
  const auto xi = shared_basis(3).nodes();
  for (int e : {0, 17, 63}) {
    const auto nodes = s.dofs->element(e);
    for (int k = 0; k <= 3; ++k)
      for (int j = 0; j <= 3; ++j) EXPECT_EQ(evaluate(s, e, xi[j], xi[k]), s.concentration[nodes[j + 4 * k]]);
  }
  const FieldSolution one = filled(build_rect_mesh(0, 0, 1, 1, 2, 2), 5, [](const Point&) { return 1.0; });
  EXPECT_NEAR(evaluate(one, 3, 0.123, -0.77), 1.0, 1e-14);
}

TEST(Evaluate, DecayMidpointAtOrderEight) {
  const SolveResult r = solve_canonical("decay1d", FormulationKind::Galerkin, 8);
  // x = 0.5 is the right end of element 1.
  EXPECT_NEAR(evaluate(r.solution, 1, 1.0), analytic_decay1d(1000, 0.5), 1e-7);
}

TEST(Evaluate, FluxOfLeastSquaresSolution) {
  // q = -c' with c' = 20 exp(-10(x+1)) - (1 - e^-20); the single-element
  // error must fall spectrally with p.
  double prev = 1.0;
  for (int p : {12, 16, 20}) {
    const SolveResult r = solve_canonical("forced1d", FormulationKind::LS1, p);
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = -1.0 + k / 100.0;
      const double dc = 20 * std::exp(-10 * (x + 1)) - (1 - std::exp(-20.0));
      worst = std::max(worst, std::abs(evaluate_flux(r.solution, 0, x).x() + dc));
    }
    EXPECT_LT(worst, prev / 50) << p;
    prev = worst;
  }
  EXPECT_LT(prev, 1e-6);
  EXPECT_EQ(evaluate_flux(solve_canonical("forced1d", FormulationKind::Galerkin, 3).solution, 0, 0.1), Point::Zero());
}

TEST(Scan, ZeroAndConstantFields) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 2, 2);
  DmpReport z = scan_extrema(filled(m, 3, [](const Point&) { return 0.0; }));
  EXPECT_EQ(z.min_value, 0.0);
  EXPECT_EQ(z.max_value, 0.0);
  z.verdicts = audit_dmp(z, constant_problem(0, 0));
  EXPECT_EQ(z.verdicts.nonneg, Verdict::Ok);
  DmpReport one = scan_extrema(filled(m, 3, [](const Point&) { return 1.0; }));
  EXPECT_NEAR(one.min_value, 1.0, 1e-14);
  EXPECT_NEAR(one.max_value, 1.0, 1e-14);
  one.verdicts = audit_dmp(one, constant_problem(0, 0));
  EXPECT_EQ(one.verdicts.nonneg, Verdict::Ok);
  EXPECT_EQ(one.verdicts.mp_diffusion, Verdict::Ok);
  EXPECT_EQ(one.verdicts.mp_decay, Verdict::Ok);
}

TEST(Scan, SampleCountsAndBoundarySplit) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 2, 2);
  const DmpReport r = scan_extrema(filled(m, 2, [](const Point& x) { return x.x() + 2 * x.y(); }), 4);
  EXPECT_EQ(r.eval_density, 4);
  EXPECT_NEAR(r.max_value, 3.0, 1e-14);
  EXPECT_NEAR(r.min_value, 0.0, 1e-14);
  EXPECT_NEAR(r.boundary_max, 3.0, 1e-14);
  EXPECT_TRUE(r.has_interior);
  EXPECT_GT(r.interior_min, 0.0);
  EXPECT_LT(r.interior_max, 3.0);
  EXPECT_GE(r.boundary_min, r.min_value);
  EXPECT_LE(r.boundary_max, r.max_value);
  EXPECT_THROW(scan_extrema(filled(m, 2, [](const Point&) { return 0.0; }), 1), Error);
}

TEST(Scan, DensityMonotonicityOnBurmanErn) {
  const FieldSolution s = solve_canonical("burman_ern", FormulationKind::Galerkin, 4).solution;
  const double m4 = scan_extrema(s, 4).min_value, m8 = scan_extrema(s, 8).min_value,
               m16 = scan_extrema(s, 16).min_value;
  EXPECT_LE(m8, m4);
  EXPECT_LE(m16, m8);
}

TEST(Scan, NegativeFractionCountsViolations) {
  const Mesh m = build_interval_mesh(-1, 1, 1);
  const DmpReport r = scan_extrema(filled(m, 1, [](const Point& x) { return x.x(); }), 16);
  EXPECT_GT(r.negative_fraction, 0.4);
  EXPECT_LT(r.negative_fraction, 0.6);
}

TEST(Audit, VerdictRules) {
  DmpReport r;
  r.min_value = -1e-3;
  r.boundary_min = 0.0;
  r.interior_min = -1e-3;
  r.max_value = r.boundary_max = 1.0;
  r.interior_max = 0.5;
  r.has_interior = true;
  ProblemSpec p = constant_problem(0, 1.0);
  Verdicts v = audit_dmp(r, p);
  EXPECT_EQ(v.nonneg, Verdict::Violated);
  EXPECT_EQ(v.mp_diffusion, Verdict::Violated);
  EXPECT_EQ(v.mp_decay, Verdict::Violated);

  // Within tolerance counts as satisfied.
  r.min_value = r.interior_min = -5e-13;
  v = audit_dmp(r, p);
  EXPECT_EQ(v.nonneg, Verdict::Ok);
  EXPECT_EQ(v.mp_diffusion, Verdict::Ok);

  // Decay: boundary minimum above zero, interior dips to zero only.
  ProblemSpec d = constant_problem(5.0, 0.0);
  r.boundary_min = 1.0;
  r.min_value = r.interior_min = 0.0;
  v = audit_dmp(r, d);
  EXPECT_EQ(v.mp_diffusion, Verdict::NotApplicable);
  EXPECT_EQ(v.mp_decay, Verdict::Ok);

  // f <= 0 with alpha = 0: the maximum side is checked.
  ProblemSpec n = constant_problem(0, -1.0);
  r.interior_max = 2.0;
  r.boundary_max = 1.0;
  EXPECT_EQ(audit_dmp(r, n).mp_diffusion, Verdict::Violated);
  EXPECT_EQ(audit_dmp(r, n).nonneg, Verdict::NotApplicable);

  ProblemSpec mixed = constant_problem(0, 0);
  mixed.coeff.forcing_sign = Sign::Mixed;
  const Verdicts m = audit_dmp(r, mixed);
  EXPECT_EQ(m.nonneg, Verdict::NotApplicable);
  EXPECT_EQ(m.mp_diffusion, Verdict::NotApplicable);
  EXPECT_EQ(m.mp_decay, Verdict::NotApplicable);
}

TEST(Audit, CanonicalVerdicts) {
  for (int p = 1; p <= 4; ++p) {
    const SolveResult r = solve_canonical("hole", FormulationKind::Galerkin, p, {1.0, 10000.0, 1e-3});
    DmpReport rep = scan_extrema(r.solution);
    EXPECT_EQ(audit_dmp(rep, canonical_problem("hole", {1.0, 10000.0, 1e-3})).nonneg, Verdict::Violated) << p;
  }
  const SolveResult d = solve_canonical("decay1d", FormulationKind::Galerkin, 10);
  EXPECT_EQ(audit_dmp(scan_extrema(d.solution), canonical_problem("decay1d")).nonneg, Verdict::Ok);
}

TEST(Audit, VerdictsSurviveSerialisation) {
  const SolveResult r = solve_canonical("lepotier", FormulationKind::Galerkin, 2);
  const ProblemSpec spec = canonical_problem("lepotier");
  DmpReport rep = scan_extrema(r.solution);
  rep.verdicts = audit_dmp(rep, spec);
  const DmpReport back = dmp_report_from_json(dmp_report_json(rep));
  EXPECT_EQ(audit_dmp(back, spec), rep.verdicts);
}

TEST(ErrorNormsTest, OwnInterpolantAndConvergence) {
  const Mesh m = build_rect_mesh(0, 0, 1, 1, 2, 2);
  auto g = [](const Point& x) { return x.x() * x.x() * x.y() - 3 * x.y() * x.y() * x.y(); };
  const ErrorNorms e = error_norms(filled(m, 3, g), g);
  EXPECT_LT(e.linf, 1e-14);
  EXPECT_LT(e.l2, 1e-14);

  const auto forced = canonical_problem("forced1d");
  EXPECT_LT(error_norms(solve_canonical("forced1d", FormulationKind::Galerkin, 10).solution, forced.analytic).l2,
            error_norms(solve_canonical("forced1d", FormulationKind::Galerkin, 4).solution, forced.analytic).l2);

  const auto decay = canonical_problem("decay1d");
  double prev = 1e300;
  for (int p : {2, 4, 6, 8}) {
    const double linf = error_norms(solve_canonical("decay1d", FormulationKind::Galerkin, p).solution, decay.analytic).linf;
    EXPECT_LT(linf, prev) << p;
    prev = linf;
  }
  EXPECT_THROW(error_norms(filled(m, 1, g), nullptr), Error);
}

TEST(Functionals, LeastSquaresZeroOnExactLinearPair) {
  // c = 1 + x - 2y, D = diag(2, 3) => q = (-2, 6); alpha = 0, f = 0.
  const Mesh m = jitter_mesh(build_rect_mesh(0, 0, 1, 1, 3, 3), 0.2, 5);
  ProblemSpec spec = constant_problem(0, 0);
  spec.coeff.diffusivity = [](const Point&) { return Eigen::Matrix2d(Eigen::Vector2d(2, 3).asDiagonal()); };
  FieldSolution s = filled(m, 4, [](const Point& x) { return 1 + x.x() - 2 * x.y(); });
  s.formulation = FormulationKind::LS1;
  s.flux.resize(s.dofs->num_nodes, 2);
  s.flux.col(0).setConstant(-2.0);
  s.flux.col(1).setConstant(6.0);
  EXPECT_LE(ls_functional_value(s, spec, {FormulationKind::LS1}), 1e-18);
  EXPECT_LE(ls_functional_value(s, spec, {FormulationKind::LS2}), 1e-18);
  s.formulation = FormulationKind::Galerkin;
  s.flux.resize(0, 0);
  EXPECT_THROW(ls_functional_value(s, spec, {FormulationKind::LS1}), Error);
}

TEST(Functionals, DiscreteSolutionsAreMinimisers) {
  std::mt19937_64 rng(12);
  for (const char* id : {"decay1d", "burman_ern"}) {
    const ProblemSpec spec = canonical_problem(id);
    const auto mesh = std::make_shared<const Mesh>(build_mesh(spec.mesh));
    for (auto kind : {FormulationKind::Galerkin, FormulationKind::LS1, FormulationKind::LS2}) {
      DiscretizationOptions opt;
      opt.formulation = kind;
      opt.order = 3;
      const SolveResult r = solve_problem(spec, mesh, opt);
      const AssembledSystem sys = build_system(spec, *mesh, opt);
      auto value = [&](const FieldSolution& s) {
        return kind == FormulationKind::Galerkin ? galerkin_energy(s, spec) : ls_functional_value(s, spec, {kind});
      };
      const double j0 = value(r.solution);
      if (kind != FormulationKind::Galerkin) EXPECT_GE(j0, 0.0);
      for (int t = 0; t < 20; ++t) {
        const double scale = t < 10 ? 1e-3 : 1.0;
        EXPECT_GE(value(perturbed(r, sys, admissible_perturbation(sys, rng, scale))), j0 - 1e-10) << id;
      }
    }
  }
}

TEST(SweepTest, BurmanErnRowsAndDeterminism) {
  const ProblemSpec spec = canonical_problem("burman_ern");
  const Mesh base = build_mesh(spec.mesh);
  SweepOptions opt;
  opt.levels = parse_levels("1..4");
  const SweepTable a = sweep(spec, base, FormulationKind::Galerkin, opt);
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_FALSE(a.partial);
  EXPECT_NEAR(a.rows[0].min_concentration, 0.0, 1e-12);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(a.rows[i].level, i + 1);
    EXPECT_EQ(a.rows[i].order, i + 1);
    EXPECT_EQ(a.rows[i].elements, 120);
  }
  opt.jobs = 3;
  EXPECT_EQ(sweep(spec, base, FormulationKind::Galerkin, opt), a);
}

TEST(SweepTest, HModeRefinesTheBaseMesh) {
  const ProblemSpec spec = canonical_problem("burman_ern");
  SweepOptions opt;
  opt.mode = SweepMode::H;
  opt.levels = {1, 2, 4};
  const SweepTable t = sweep(spec, build_mesh(spec.mesh), FormulationKind::Galerkin, opt);
  EXPECT_EQ(t.rows[0].elements, 120);
  EXPECT_EQ(t.rows[1].elements, 480);
  EXPECT_EQ(t.rows[2].elements, 1920);
  for (const auto& r : t.rows) EXPECT_EQ(r.order, 1);
  EXPECT_NEAR(t.rows[2].min_concentration, 0.0, 1e-12);
}

TEST(SweepTest, FailingLevelFlagsPartialTable) {
  const ProblemSpec spec = canonical_problem("forced1d");
  SweepOptions opt;
  opt.levels = {1, 2, 3};
  opt.discretization.ngp = 2;  // too few points from p = 2 on
  const SweepTable t = sweep(spec, build_mesh(spec.mesh), FormulationKind::Galerkin, opt);
  EXPECT_TRUE(t.partial);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_FALSE(t.failure.empty());
}

TEST(SweepTest, ParseLevels) {
  EXPECT_EQ(parse_levels("1..3,8"), (std::vector<int>{1, 2, 3, 8}));
  EXPECT_EQ(parse_levels("5"), (std::vector<int>{5}));
  EXPECT_THROW(parse_levels(""), Error);
  EXPECT_THROW(parse_levels("3..1"), Error);
  EXPECT_THROW(parse_levels("a"), Error);
}

TEST(Properties, LeastSquaresFormulationsCoincideForIsotropicDiffusion) {
  for (int p : {1, 3, 5}) {
    const SolveResult a = solve_canonical("burman_ern", FormulationKind::LS1, p);
    const SolveResult b = solve_canonical("burman_ern", FormulationKind::LS2, p);
    EXPECT_LT((a.solution.dof_vector() - b.solution.dof_vector()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Properties, LePotierStructuredMeshViolates) {
  for (auto kind : {FormulationKind::Galerkin, FormulationKind::LS1, FormulationKind::LS2})
    for (int p = 1; p <= 6; ++p) EXPECT_LT(min_of("lepotier", kind, p), 0.0) << to_string(kind) << " p=" << p;
}

TEST(Properties, StrongerAnisotropyWorsensHoleViolation) {
  for (auto kind : {FormulationKind::Galerkin, FormulationKind::LS2}) {
    for (int p : {1, 3}) {
      const double weak = min_of("hole", kind, p, {1.0, 100.0, 1e-3});
      const double strong = min_of("hole", kind, p, {1.0, 10000.0, 1e-3});
      EXPECT_GT(std::abs(strong), std::abs(weak)) << to_string(kind) << " p=" << p;
    }
  }
}
