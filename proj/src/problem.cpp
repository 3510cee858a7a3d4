#include "dmpfem/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "dmpfem/error.hpp"

namespace dmpfem {

const char* to_string(Sign s) noexcept {
  switch (s) {
    case Sign::Zero: return "zero";
    case Sign::NonNegative: return "nonnegative";
    case Sign::NonPositive: return "nonpositive";
    case Sign::Mixed: return "mixed";
  }
  return "mixed";
}

double analytic_decay1d(double alpha, double x) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "analytic_decay1d: alpha must be > 0");
  const double s = std::sqrt(alpha);
  return (std::exp(-s * (1.0 - x)) + std::exp(-s * x)) / (1.0 + std::exp(-s));
}

double analytic_forced1d(double x) {
  const double e20 = std::exp(-20.0);
  return -2.0 * std::exp(-10.0 * (x + 1.0)) - (1.0 - e20) * x + (1.0 + e20);
}

Eigen::Matrix2d lepotier_diffusivity(double x, double y, double eps) {
  Eigen::Matrix2d d;
  const double off = -(1.0 - eps) * x * y;
  d << y * y + eps * x * x, off, off, x * x + eps * y * y;
  return d;
}

Eigen::Matrix2d rotated_diffusivity(double k1, double k2, double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r * Eigen::Vector2d(k1, k2).asDiagonal() * r.transpose();
}

std::pair<double, double> sym_eigenvalues(const Eigen::Matrix2d& d) {
  const double mean = 0.5 * (d(0, 0) + d(1, 1));
  const double half_diff = 0.5 * (d(0, 0) - d(1, 1));
  const double rad = std::hypot(half_diff, d(0, 1));
  return {mean - rad, mean + rad};
}

Eigen::Matrix2d d_inv_sqrt(const Eigen::Matrix2d& d) {
  const auto [lo, hi] = sym_eigenvalues(d);
  if (!(lo > 1e-14)) {
    std::ostringstream msg;
    msg << "d_inv_sqrt: eigenvalue " << lo << " <= 1e-14";
    fail(ErrorKind::DegenerateCoefficient, msg.str());
  }
  const double b = 0.5 * (d(0, 1) + d(1, 0));
  if (b == 0.0) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = 1.0 / std::sqrt(d(0, 0));
    m(1, 1) = 1.0 / std::sqrt(d(1, 1));
    return m;
  }
  // Eigenvector for `hi`; pick the better-conditioned of the two forms.
  Eigen::Vector2d v1(b, hi - d(0, 0));
  const Eigen::Vector2d v2(hi - d(1, 1), b);
  if (v2.norm() > v1.norm()) v1 = v2;
  v1.normalize();
  const Eigen::Matrix2d p_hi = v1 * v1.transpose();
  const Eigen::Matrix2d p_lo = Eigen::Matrix2d::Identity() - p_hi;
  return p_hi / std::sqrt(hi) + p_lo / std::sqrt(lo);
}

namespace {

double indicator(bool inside) { return inside ? 1.0 : 0.0; }

Eigen::Matrix2d scalar_diffusivity(double d) {
  return Eigen::Vector2d(d, d).asDiagonal();
}

ProblemSpec decay1d() {
  constexpr double alpha = 1000.0;
  ProblemSpec s;
  s.name = "decay1d";
  s.dim = 1;
  s.mesh = build_interval_mesh(0.0, 1.0, 4).descriptor;
  s.coeff.alpha = [](const Point&) { return alpha; };
  s.coeff.diffusivity = [](const Point&) { return scalar_diffusivity(1.0); };
  s.coeff.forcing = [](const Point&) { return 0.0; };
  s.coeff.alpha_bound = alpha + 1.0;
  s.coeff.alpha_zero = false;
  s.coeff.forcing_sign = Sign::Zero;
  s.boundary.dirichlet = [](const Point&, int) { return 1.0; };
  s.analytic = [](const Point& x) { return analytic_decay1d(alpha, x.x()); };
  s.summary = "1D decay alpha=1000 on (0,1), c=1 at both ends, 4 elements";
  return s;
}

ProblemSpec forced1d() {
  ProblemSpec s;
  s.name = "forced1d";
  s.dim = 1;
  s.mesh = build_interval_mesh(-1.0, 1.0, 1).descriptor;
  s.coeff.alpha = [](const Point&) { return 0.0; };
  s.coeff.diffusivity = [](const Point&) { return scalar_diffusivity(1.0); };
  s.coeff.forcing = [](const Point& x) { return 200.0 * std::exp(-10.0 * (x.x() + 1.0)); };
  s.coeff.forcing_sign = Sign::NonNegative;
  s.coeff.variable_coefficients = true;
  s.boundary.dirichlet = [](const Point&, int) { return 0.0; };
  s.analytic = [](const Point& x) { return analytic_forced1d(x.x()); };
  s.summary = "1D pure diffusion on (-1,1), f=200 exp(-10(x+1)), zero ends, 1 element";
  return s;
}

ProblemSpec burman_ern() {
  ProblemSpec s;
  s.name = "burman_ern";
  s.dim = 2;
  s.mesh = build_rect_mesh(0.0, 0.0, 1.0, 0.3, 20, 6).descriptor;
  s.coeff.alpha = [](const Point&) { return 0.0; };
  s.coeff.diffusivity = [](const Point&) { return Eigen::Matrix2d::Identity().eval(); };
  s.coeff.forcing = [](const Point& x) {
    return indicator(x.x() >= 0.0 && x.x() <= 0.5 && x.y() >= 0.0 && x.y() <= 0.075);
  };
  s.coeff.forcing_sign = Sign::NonNegative;
  s.boundary.dirichlet = [](const Point&, int) { return 0.0; };
  s.summary = "isotropic diffusion on (0,1)x(0,0.3), f = 1 on [0,0.5]x[0,0.075]";
  return s;
}

ProblemSpec lepotier(double eps) {
  ProblemSpec s;
  s.name = "lepotier";
  s.dim = 2;
  s.mesh = build_rect_mesh(0.0, 0.0, 0.5, 0.5, 8, 8).descriptor;
  s.coeff.alpha = [](const Point&) { return 0.0; };
  s.coeff.diffusivity = [eps](const Point& x) { return lepotier_diffusivity(x.x(), x.y(), eps); };
  s.coeff.forcing = [](const Point& x) {
    return indicator(x.x() >= 0.125 && x.x() <= 0.375 && x.y() >= 0.125 && x.y() <= 0.375);
  };
  // Eigenvalues are (x^2 + y^2) {eps, 1}; D vanishes at the origin, so the
  // lower bound only holds outside a 1e-6 ball around that corner.
  s.coeff.lambda_min = eps * 1e-12;
  s.coeff.lambda_max = 0.5;
  s.coeff.forcing_sign = Sign::NonNegative;
  s.coeff.variable_coefficients = true;
  s.boundary.dirichlet = [](const Point&, int) { return 0.0; };
  s.summary = "non-uniform anisotropic diffusion on (0,0.5)^2, f = 1 on [0.125,0.375]^2";
  return s;
}

ProblemSpec hole(double k1, double k2) {
  const bool allowed = k1 == 1.0 && (k2 == 100.0 || k2 == 10000.0);
  if (!allowed) {
    fail(ErrorKind::InvalidArgument, "hole: (k1, k2) must be (1, 100) or (1, 10000)");
  }
  const Eigen::Matrix2d d = rotated_diffusivity(k1, k2, std::numbers::pi / 6.0);
  ProblemSpec s;
  s.name = "hole";
  s.dim = 2;
  s.mesh = build_hole_mesh(2).descriptor;
  s.coeff.alpha = [](const Point&) { return 0.0; };
  s.coeff.diffusivity = [d](const Point&) { return d; };
  s.coeff.forcing = [](const Point&) { return 0.0; };
  s.coeff.lambda_min = std::min(k1, k2);
  s.coeff.lambda_max = std::max(k1, k2);
  s.coeff.forcing_sign = Sign::Zero;
  s.boundary.dirichlet = [](const Point&, int region) { return region == kInnerRegion ? 2.0 : 0.0; };
  std::ostringstream sum;
  sum << "rotated anisotropic diffusion (k1=" << k1 << ", k2=" << k2
      << ", theta=pi/6) on [0,1]^2 minus [4/9,5/9]^2; c=0 outer, c=2 inner";
  s.summary = sum.str();
  return s;
}

}  // namespace

const std::vector<std::string>& canonical_problem_ids() {
  static const std::vector<std::string> ids = {"decay1d", "forced1d", "burman_ern", "lepotier", "hole"};
  return ids;
}

ProblemSpec canonical_problem(const std::string& id, const ProblemParams& params) {
  if (id == "decay1d") return decay1d();
  if (id == "forced1d") return forced1d();
  if (id == "burman_ern") return burman_ern();
  if (id == "lepotier") return lepotier(params.lepotier_eps);
  if (id == "hole") return hole(params.k1, params.k2);
  fail(ErrorKind::InvalidArgument, "unknown problem '" + id + "'");
}

// ---------------------------------------------------------------------------
// Text configuration

namespace {

std::vector<double> numbers(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) fail(ErrorKind::InvalidArgument, "problem config: '" + key + "' expects numbers");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ProblemSpec load_problem_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::InvalidArgument, "problem config line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  static const std::set<std::string> known = {"name",    "dim",       "domain",          "elements", "alpha",
                                                "diffusivity", "forcing", "dirichlet", "dirichlet_inner", "mesh",
                                                "hole_n"};
  for (const auto& [key, value] : kv) {
    if (!known.count(key)) fail(ErrorKind::InvalidArgument, "problem config: unknown key '" + key + "'");
  }
  auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };

  ProblemSpec s;
  s.name = get("name", "custom");
  s.dim = static_cast<int>(numbers(get("dim", "2"), "dim").at(0));
  if (s.dim != 1 && s.dim != 2) fail(ErrorKind::InvalidArgument, "problem config: dim must be 1 or 2");

  const std::string mesh_kind = get("mesh", s.dim == 1 ? "interval" : "rectangle");
  if (s.dim == 1) {
    const auto dom = numbers(get("domain", "0 1"), "domain");
    const auto ne = numbers(get("elements", "4"), "elements");
    if (dom.size() != 2 || ne.size() != 1) fail(ErrorKind::InvalidArgument, "problem config: 1D domain is `a b`, elements is `ne`");
    s.mesh = build_interval_mesh(dom[0], dom[1], static_cast<int>(ne[0])).descriptor;
  } else if (mesh_kind == "hole") {
    s.mesh = build_hole_mesh(static_cast<int>(numbers(get("hole_n", "2"), "hole_n").at(0))).descriptor;
  } else {
    const auto dom = numbers(get("domain", "0 0 1 1"), "domain");
    const auto ne = numbers(get("elements", "8 8"), "elements");
    if (dom.size() != 4 || ne.size() != 2) fail(ErrorKind::InvalidArgument, "problem config: 2D domain is `x0 y0 x1 y1`, elements is `nx ny`");
    s.mesh = build_rect_mesh(dom[0], dom[1], dom[2], dom[3], static_cast<int>(ne[0]), static_cast<int>(ne[1])).descriptor;
  }

  const double alpha = numbers(get("alpha", "0"), "alpha").at(0);
  if (alpha < 0.0) fail(ErrorKind::InvalidArgument, "problem config: alpha must be >= 0");
  s.coeff.alpha = [alpha](const Point&) { return alpha; };
  s.coeff.alpha_zero = alpha == 0.0;
  s.coeff.alpha_bound = alpha + 1.0;

  const auto dv = numbers(get("diffusivity", "1"), "diffusivity");
  Eigen::Matrix2d d;
  if (dv.size() == 1) d = scalar_diffusivity(dv[0]);
  else if (dv.size() == 3) d << dv[0], dv[1], dv[1], dv[2];
  else fail(ErrorKind::InvalidArgument, "problem config: diffusivity is `d` or `dxx dxy dyy`");
  const auto [lo, hi] = s.dim == 1 ? std::pair{d(0, 0), d(0, 0)} : sym_eigenvalues(d);
  if (!(lo > 0.0)) fail(ErrorKind::InvalidArgument, "problem config: diffusivity must be positive definite");
  s.coeff.diffusivity = [d](const Point&) { return d; };
  s.coeff.lambda_min = lo;
  s.coeff.lambda_max = hi;

  std::istringstream fs(get("forcing", "poly"));
  std::string ftype;
  fs >> ftype;
  std::string rest;
  std::getline(fs, rest);
  const auto fv = numbers(rest, "forcing");
  if (ftype == "poly") {
    if (fv.size() % 3 != 0) fail(ErrorKind::InvalidArgument, "problem config: poly forcing takes `coef px py` triples");
    bool any_pos = false, any_neg = false, nonconst = false;
    for (std::size_t i = 0; i < fv.size(); i += 3) {
      if (fv[i + 1] != 0.0 || fv[i + 2] != 0.0) nonconst = true;
      any_pos |= fv[i] > 0.0;
      any_neg |= fv[i] < 0.0;
    }
    s.coeff.forcing = [fv](const Point& x) {
      double sum = 0.0;
      for (std::size_t i = 0; i < fv.size(); i += 3) {
        sum += fv[i] * std::pow(x.x(), fv[i + 1]) * std::pow(x.y(), fv[i + 2]);
      }
      return sum;
    };
    // Only constant forcings get a definite sign without sampling.
    if (!any_pos && !any_neg) s.coeff.forcing_sign = Sign::Zero;
    else if (nonconst) s.coeff.forcing_sign = Sign::Mixed;
    else s.coeff.forcing_sign = any_neg ? Sign::NonPositive : Sign::NonNegative;
    s.coeff.variable_coefficients = nonconst;
  } else if (ftype == "indicator") {
    const std::size_t want = s.dim == 1 ? 3 : 5;
    if (fv.size() != want) fail(ErrorKind::InvalidArgument, "problem config: indicator forcing is `x0 x1 [y0 y1] value`");
    const double value = fv.back();
    const int dim = s.dim;
    s.coeff.forcing = [fv, value, dim](const Point& x) {
      const bool in_x = x.x() >= fv[0] && x.x() <= fv[1];
      const bool in_y = dim == 1 || (x.y() >= fv[2] && x.y() <= fv[3]);
      return in_x && in_y ? value : 0.0;
    };
    s.coeff.forcing_sign = value == 0.0 ? Sign::Zero : (value > 0.0 ? Sign::NonNegative : Sign::NonPositive);
  } else {
    fail(ErrorKind::InvalidArgument, "problem config: forcing type must be poly or indicator");
  }

  const double c_out = numbers(get("dirichlet", "0"), "dirichlet").at(0);
  const double c_in = numbers(get("dirichlet_inner", std::to_string(c_out)), "dirichlet_inner").at(0);
  s.boundary.dirichlet = [c_out, c_in](const Point&, int region) {
    return region == kInnerRegion ? c_in : c_out;
  };
  s.boundary.dirichlet_nonneg = c_out >= 0.0 && c_in >= 0.0;
  s.summary = "user problem '" + s.name + "'";
  return s;
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open problem file '" + path + "'");
  return load_problem_config(in);
}

}  // namespace dmpfem
