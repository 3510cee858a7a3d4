#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "dmpfem/basis.hpp"
#include "dmpfem/error.hpp"
#include "dmpfem/mesh.hpp"
#include "dmpfem/quadrature.hpp"

using namespace dmpfem;

namespace {

double mesh_area(const Mesh& m) {
  const QuadratureRule r = gauss_rule(3);
  double a = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) {
    const ElementMap map(m, e);
    if (m.dim == 1) {
      for (int i = 0; i < r.count(); ++i) a += r.weights[i] * map.det(r.points[i]);
    } else {
      for (int i = 0; i < r.count(); ++i)
        for (int j = 0; j < r.count(); ++j) a += r.weights[i] * r.weights[j] * map.det(r.points[i], r.points[j]);
    }
  }
  return a;
}

// Number of distinct node coordinates, counted by rounding to a fine lattice.
int unique_nodes(const DofMap& dm) {
  std::set<std::pair<long long, long long>> seen;
  for (const Point& x : dm.node_coords) seen.insert({std::llround(x.x() * 1e9), std::llround(x.y() * 1e9)});
  return static_cast<int>(seen.size());
}

bool on_rect_boundary(const Point& x, double x0, double y0, double x1, double y1) {
  const double t = 1e-12;
  return std::abs(x.x() - x0) < t || std::abs(x.x() - x1) < t || std::abs(x.y() - y0) < t || std::abs(x.y() - y1) < t;
}

}  // namespace

TEST(IntervalMesh, Builders) {
  const Mesh m = build_interval_mesh(0.0, 1.0, 4);
  ASSERT_EQ(m.num_vertices(), 5);
  for (int i = 0; i <= 4; ++i) EXPECT_DOUBLE_EQ(m.vertices[i].x(), 0.25 * i);
  EXPECT_EQ(m.boundary.size(), 2u);
  for (const auto& b : m.boundary) EXPECT_EQ(b.tag, BoundaryTag::Dirichlet);
  EXPECT_EQ(build_interval_mesh(-1.0, 1.0, 1).num_elements(), 1);
  EXPECT_EQ(build_interval_mesh(0.0, 1.0, 2).num_vertices(), 3);
  EXPECT_THROW(build_interval_mesh(1.0, 1.0, 2), Error);
  EXPECT_THROW(build_interval_mesh(0.0, 1.0, 0), Error);
}

TEST(RectMesh, Builders) {
  const Mesh m = build_rect_mesh(0, 0, 1, 0.3, 20, 6);
  EXPECT_EQ(m.num_elements(), 120);
  const ElementMap map(m, 0);
  EXPECT_NEAR(map.corner(2).x() - map.corner(0).x(), 0.05, 1e-15);
  EXPECT_NEAR(map.corner(2).y() - map.corner(0).y(), 0.05, 1e-15);
  // x = 0.5 is a vertex line; y = 0.075 falls inside the second element row.
  bool has_x = false, has_y = false;
  for (const Point& v : m.vertices) {
    has_x = has_x || std::abs(v.x() - 0.5) < 1e-14;
    has_y = has_y || std::abs(v.y() - 0.075) < 1e-14;
  }
  EXPECT_TRUE(has_x);
  EXPECT_FALSE(has_y);
  EXPECT_EQ(build_rect_mesh(0, 0, 0.5, 0.5, 8, 8).num_elements(), 64);
  const Mesh one = build_rect_mesh(0, 0, 1, 1, 1, 1);
  EXPECT_EQ(one.boundary.size(), 4u);
  EXPECT_THROW(build_rect_mesh(0, 0, 0, 1, 1, 1), Error);
}

TEST(HoleMesh, CountsAndRegions) {
  for (int n : {1, 2, 3}) {
    const Mesh m = build_hole_mesh(n);
    EXPECT_EQ(m.num_elements(), 80 * n * n);
    int inner = 0, outer = 0;
    for (const auto& b : m.boundary) (b.region == kInnerRegion ? inner : outer)++;
    EXPECT_EQ(inner, 4 * n);
    EXPECT_EQ(outer, 4 * 9 * n);
    EXPECT_NEAR(mesh_area(m), 1.0 - 1.0 / 81.0, 1e-12);
  }
}

TEST(ElementMapTest, RectangleAndInterval) {
  const Mesh sq = build_rect_mesh(0, 0, 1, 1, 1, 1);
  const ElementMap m(sq, 0);
  EXPECT_NEAR(m.point(0, 0).x(), 0.5, 1e-15);
  EXPECT_NEAR(m.det(0, 0), 0.25, 1e-15);
  const Eigen::Matrix2d j = m.jacobian(0.3, -0.2);
  EXPECT_EQ(j(0, 1), 0.0);
  EXPECT_EQ(j(1, 0), 0.0);

  const Mesh iv = build_interval_mesh(0.0, 1.0, 4);
  const ElementMap e1(iv, 1);
  EXPECT_DOUBLE_EQ(e1.point(-1.0).x(), 0.25);
  EXPECT_DOUBLE_EQ(e1.det(-1.0), 0.125);
}

TEST(ElementMapTest, JitteredCornersInterpolate) {
  const Mesh m = jitter_mesh(build_rect_mesh(0, 0, 0.5, 0.5, 8, 8), 0.2, 42);
  const double c[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (int e = 0; e < m.num_elements(); ++e) {
    const ElementMap map(m, e);
    for (int i = 0; i < 4; ++i) {
      const Point x = map.point(c[i][0], c[i][1]);
      EXPECT_EQ(x, m.vertices[m.elements[e][i]]);
    }
  }
}

TEST(Jitter, ZeroAmplitudeDeterminismAndValidity) {
  const Mesh base = build_rect_mesh(0, 0, 0.5, 0.5, 8, 8);
  EXPECT_EQ(jitter_mesh(base, 0.0, 7).vertices, base.vertices);
  const Mesh a = jitter_mesh(base, 0.2, 42), b = jitter_mesh(base, 0.2, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.vertices, base.vertices);
  const QuadratureRule r = gauss_rule(6);
  double lo = 1e300;
  for (int e = 0; e < a.num_elements(); ++e) {
    const ElementMap map(a, e);
    for (double xi : r.points)
      for (double eta : r.points) lo = std::min(lo, map.det(xi, eta));
  }
  EXPECT_GT(lo, 0.0);
  // Boundary vertices stay put.
  for (std::size_t i = 0; i < base.vertices.size(); ++i) {
    if (on_rect_boundary(base.vertices[i], 0, 0, 0.5, 0.5)) EXPECT_EQ(a.vertices[i], base.vertices[i]);
  }
  EXPECT_NEAR(mesh_area(a), 0.25, 1e-12);
}

TEST(Lcg, DocumentedRecurrence) {
  Lcg64 g(0);
  EXPECT_EQ(g.next(), 1442695040888963407ULL);
  EXPECT_EQ(g.next(), 1442695040888963407ULL * 6364136223846793005ULL + 1442695040888963407ULL);
  Lcg64 h(5);
  const double u = h.unit();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(Refine, Examples) {
  EXPECT_EQ(refine(build_interval_mesh(0, 1, 4), 2).vertices, build_interval_mesh(0, 1, 8).vertices);
  const Mesh r = refine(build_rect_mesh(0, 0, 1, 0.3, 20, 6), 2);
  EXPECT_EQ(r.num_elements(), 480);
  EXPECT_NEAR(mesh_area(r), 0.3, 1e-12);

  const Mesh h = refine(build_hole_mesh(1), 2), h2 = build_hole_mesh(2);
  EXPECT_EQ(h.num_elements(), h2.num_elements());
  auto edges_of = [](const Mesh& m) {
    std::multiset<std::tuple<long long, long long, int>> s;
    for (const auto& b : m.boundary) {
      const ElementMap map(m, b.element);
      const auto st = edge_point(b.local_edge, 0.0);
      const Point x = map.point(st[0], st[1]);
      s.insert({std::llround(x.x() * 1e9), std::llround(x.y() * 1e9), b.region});
    }
    return s;
  };
  EXPECT_EQ(edges_of(h), edges_of(h2));
  EXPECT_NEAR(mesh_area(h), mesh_area(h2), 1e-13);
}

TEST(DofMapTest, CountFormulaAndContinuity) {
  for (int p = 1; p <= 8; ++p) {
    const Mesh m = build_rect_mesh(0, 0, 1, 0.3, 5, 3);
    const DofMap dm = build_dof_map(m, p);
    EXPECT_EQ(dm.num_nodes, (5 * p + 1) * (3 * p + 1));
    EXPECT_EQ(unique_nodes(dm), dm.num_nodes);
  }
  const Mesh iv = build_interval_mesh(0, 1, 4);
  EXPECT_EQ(build_dof_map(iv, 6).num_nodes, 25);

  // Each element sees its global nodes at the mapped GLL positions, so nodes
  // shared by neighbours agree.
  const Mesh j = jitter_mesh(build_rect_mesh(0, 0, 1, 1, 4, 4), 0.2, 3);
  const int p = 4;
  const DofMap dm = build_dof_map(j, p);
  const auto xi = shared_basis(p).nodes();
  for (int e = 0; e < j.num_elements(); ++e) {
    const ElementMap map(j, e);
    const auto nodes = dm.element(e);
    for (int k = 0; k <= p; ++k)
      for (int i = 0; i <= p; ++i) {
        const Point x = map.point(xi[i], xi[k]);
        EXPECT_LT((x - dm.node_coords[nodes[i + k * (p + 1)]]).norm(), 1e-14);
      }
  }
}

TEST(DofMapTest, DirichletNodesLieOnBoundary) {
  const Mesh m = build_rect_mesh(0, 0, 1, 0.3, 4, 3);
  const DofMap dm = build_dof_map(m, 5);
  int count = 0;
  for (const auto& b : dm.boundary_nodes) {
    EXPECT_TRUE(on_rect_boundary(dm.node_coords[b.node], 0, 0, 1, 0.3));
    ++count;
  }
  EXPECT_EQ(count, 2 * (4 * 5) + 2 * (3 * 5));
}

TEST(MeshIo, TextRoundTrip) {
  const Mesh m = jitter_mesh(build_hole_mesh(1), 0.1, 9);
  std::stringstream s;
  write_mesh(m, s);
  const Mesh back = read_mesh(s);
  EXPECT_EQ(back.vertices, m.vertices);
  EXPECT_EQ(back.elements, m.elements);
  EXPECT_EQ(back.boundary, m.boundary);
  std::istringstream bad("2 1 3\n0 0\n1 0\n1 1\n0 1 2 3\n");
  EXPECT_THROW(read_mesh(bad), Error);
}
