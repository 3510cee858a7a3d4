#include "dmpfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "dmpfem/basis.hpp"
#include "dmpfem/error.hpp"

namespace dmpfem {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace

Mesh build_interval_mesh(double a, double b, int ne) {
  require(a < b, "build_interval_mesh: need a < b");
  require(ne >= 1, "build_interval_mesh: need ne >= 1");
  Mesh mesh;
  mesh.dim = 1;
  mesh.vertices.reserve(static_cast<std::size_t>(ne) + 1);
  for (int i = 0; i <= ne; ++i) {
    const double x = (i == ne) ? b : a + (b - a) * i / ne;
    mesh.vertices.emplace_back(x, 0.0);
  }
  for (int e = 0; e < ne; ++e) mesh.elements.push_back({e, e + 1, -1, -1});
  mesh.boundary.push_back({0, 0, BoundaryTag::Dirichlet, kOuterRegion});
  mesh.boundary.push_back({ne - 1, 1, BoundaryTag::Dirichlet, kOuterRegion});
  mesh.descriptor.kind = MeshKind::Interval;
  mesh.descriptor.x0 = a;
  mesh.descriptor.x1 = b;
  mesh.descriptor.nx = ne;
  return mesh;
}

Mesh build_rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny) {
  require(x0 < x1 && y0 < y1, "build_rect_mesh: degenerate extents");
  require(nx >= 1 && ny >= 1, "build_rect_mesh: need nx, ny >= 1");
  Mesh mesh;
  mesh.dim = 2;
  auto coord = [](double lo, double hi, int i, int n) {
    return i == n ? hi : lo + (hi - lo) * i / n;
  };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.emplace_back(coord(x0, x1, i, nx), coord(y0, y1, j, ny));
    }
  }
  auto vid = [nx](int i, int j) { return i + j * (nx + 1); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  auto eid = [nx](int i, int j) { return i + j * nx; };
  for (int i = 0; i < nx; ++i) mesh.boundary.push_back({eid(i, 0), 0});
  for (int j = 0; j < ny; ++j) mesh.boundary.push_back({eid(nx - 1, j), 1});
  for (int i = nx - 1; i >= 0; --i) mesh.boundary.push_back({eid(i, ny - 1), 2});
  for (int j = ny - 1; j >= 0; --j) mesh.boundary.push_back({eid(0, j), 3});

  mesh.descriptor.kind = MeshKind::Rectangle;
  mesh.descriptor.x0 = x0;
  mesh.descriptor.y0 = y0;
  mesh.descriptor.x1 = x1;
  mesh.descriptor.y1 = y1;
  mesh.descriptor.nx = nx;
  mesh.descriptor.ny = ny;
  return mesh;
}

Mesh build_hole_mesh(int n) {
  require(n >= 1, "build_hole_mesh: need n >= 1");
  const int m = 9 * n;
  const int lo = 4 * n, hi = 5 * n;
  auto in_hole_cell = [&](int i, int j) { return i >= lo && i < hi && j >= lo && j < hi; };
  auto in_hole_vertex = [&](int i, int j) { return i > lo && i < hi && j > lo && j < hi; };

  Mesh mesh;
  mesh.dim = 2;
  std::vector<int> vid(static_cast<std::size_t>((m + 1) * (m + 1)), -1);
  auto coord = [m](int i) { return i == m ? 1.0 : static_cast<double>(i) / m; };
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      if (in_hole_vertex(i, j)) continue;
      vid[static_cast<std::size_t>(i + j * (m + 1))] = mesh.num_vertices();
      mesh.vertices.emplace_back(coord(i), coord(j));
    }
  }
  auto v = [&](int i, int j) { return vid[static_cast<std::size_t>(i + j * (m + 1))]; };

  std::vector<int> eid(static_cast<std::size_t>(m * m), -1);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      if (in_hole_cell(i, j)) continue;
      eid[static_cast<std::size_t>(i + j * m)] = mesh.num_elements();
      mesh.elements.push_back({v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)});
    }
  }
  auto e = [&](int i, int j) { return eid[static_cast<std::size_t>(i + j * m)]; };

  for (int i = 0; i < m; ++i) mesh.boundary.push_back({e(i, 0), 0});
  for (int j = 0; j < m; ++j) mesh.boundary.push_back({e(m - 1, j), 1});
  for (int i = m - 1; i >= 0; --i) mesh.boundary.push_back({e(i, m - 1), 2});
  for (int j = m - 1; j >= 0; --j) mesh.boundary.push_back({e(0, j), 3});

  const auto inner = [](int el, int edge) {
    return BoundaryEdge{el, edge, BoundaryTag::Dirichlet, kInnerRegion};
  };
  for (int i = lo; i < hi; ++i) mesh.boundary.push_back(inner(e(i, lo - 1), 2));
  for (int j = lo; j < hi; ++j) mesh.boundary.push_back(inner(e(hi, j), 3));
  for (int i = lo; i < hi; ++i) mesh.boundary.push_back(inner(e(i, hi), 0));
  for (int j = lo; j < hi; ++j) mesh.boundary.push_back(inner(e(lo - 1, j), 1));

  mesh.descriptor.kind = MeshKind::Hole;
  mesh.descriptor.hole_n = n;
  return mesh;
}

Mesh build_mesh(const MeshDescriptor& d) {
  Mesh mesh;
  switch (d.kind) {
    case MeshKind::Interval: mesh = build_interval_mesh(d.x0, d.x1, d.nx); break;
    case MeshKind::Rectangle: mesh = build_rect_mesh(d.x0, d.y0, d.x1, d.y1, d.nx, d.ny); break;
    case MeshKind::Hole: mesh = build_hole_mesh(d.hole_n); break;
    case MeshKind::Imported:
      fail(ErrorKind::InvalidArgument, "build_mesh: imported meshes cannot be rebuilt from a descriptor");
  }
  if (d.jitter_amplitude > 0.0) mesh = jitter_mesh(mesh, d.jitter_amplitude, d.jitter_seed);
  return mesh;
}

// ---------------------------------------------------------------------------
// Element geometry

std::array<double, 2> edge_point(int edge, double s) {
  switch (edge) {
    case 0: return {s, -1.0};
    case 1: return {1.0, s};
    case 2: return {-s, 1.0};
    case 3: return {-1.0, -s};
    default: fail(ErrorKind::InvalidArgument, "edge_point: local edge out of range");
  }
}

ElementMap::ElementMap(const Mesh& mesh, int element) : dim_(mesh.dim) {
  if (element < 0 || element >= mesh.num_elements()) {
    fail(ErrorKind::InvalidArgument, "element_map: element index out of range");
  }
  const auto& el = mesh.elements[static_cast<std::size_t>(element)];
  for (int a = 0; a < mesh.vertices_per_element(); ++a) {
    corners_[static_cast<std::size_t>(a)] =
        mesh.vertices[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
  }
  if (dim_ == 1) {
    corners_[2] = corners_[1];
    corners_[3] = corners_[0];
  }
}

Point ElementMap::point(double xi, double eta) const {
  if (dim_ == 1) {
    return Point(0.5 * (1.0 - xi) * corners_[0].x() + 0.5 * (1.0 + xi) * corners_[1].x(), 0.0);
  }
  const double n0 = 0.25 * (1 - xi) * (1 - eta), n1 = 0.25 * (1 + xi) * (1 - eta);
  const double n2 = 0.25 * (1 + xi) * (1 + eta), n3 = 0.25 * (1 - xi) * (1 + eta);
  return n0 * corners_[0] + n1 * corners_[1] + n2 * corners_[2] + n3 * corners_[3];
}

Eigen::Matrix2d ElementMap::jacobian(double xi, double eta) const {
  Eigen::Matrix2d j;
  if (dim_ == 1) {
    j << 0.5 * (corners_[1].x() - corners_[0].x()), 0.0, 0.0, 1.0;
    return j;
  }
  const double dxi[4] = {-(1 - eta), (1 - eta), (1 + eta), -(1 + eta)};
  const double deta[4] = {-(1 - xi), -(1 + xi), (1 + xi), (1 - xi)};
  Point a = Point::Zero(), b = Point::Zero();
  for (std::size_t k = 0; k < 4; ++k) {
    a += 0.25 * dxi[k] * corners_[k];
    b += 0.25 * deta[k] * corners_[k];
  }
  j.col(0) = a;
  j.col(1) = b;
  return j;
}

double ElementMap::det(double xi, double eta) const { return jacobian(xi, eta).determinant(); }

Eigen::Matrix2d ElementMap::inverse_transpose(double xi, double eta) const {
  return jacobian(xi, eta).inverse().transpose();
}

ElementMap element_map(const Mesh& mesh, int element) { return ElementMap(mesh, element); }

EdgeFrame edge_frame(const ElementMap& map, int edge, double s) {
  // d(xi, eta)/ds along the counter-clockwise parametrisation of each edge.
  static constexpr double tangent[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  if (edge < 0 || edge > 3) fail(ErrorKind::InvalidArgument, "edge_frame: local edge out of range");
  const auto a = edge_point(edge, s);
  const Point t = map.jacobian(a[0], a[1]) * Point(tangent[edge][0], tangent[edge][1]);
  const double len = t.norm();
  return {Point(t.y(), -t.x()) / len, len};
}

double min_jacobian(const Mesh& mesh) {
  double mn = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap map(mesh, e);
    if (mesh.dim == 1) {
      mn = std::min(mn, map.det(0.0));
      continue;
    }
    for (double xi : {-1.0, 1.0}) {
      for (double eta : {-1.0, 1.0}) mn = std::min(mn, map.det(xi, eta));
    }
  }
  return mn;
}

// ---------------------------------------------------------------------------
// Jitter and refinement

namespace {

std::vector<bool> boundary_vertices(const Mesh& mesh) {
  std::vector<bool> on(mesh.vertices.size(), false);
  for (const auto& be : mesh.boundary) {
    const auto& el = mesh.elements[static_cast<std::size_t>(be.element)];
    if (mesh.dim == 1) {
      on[static_cast<std::size_t>(el[static_cast<std::size_t>(be.local_edge)])] = true;
      continue;
    }
    const auto a = static_cast<std::size_t>(be.local_edge);
    on[static_cast<std::size_t>(el[a])] = true;
    on[static_cast<std::size_t>(el[(a + 1) % 4])] = true;
  }
  return on;
}

}  // namespace

Mesh jitter_mesh(const Mesh& mesh, double amplitude, std::uint64_t seed) {
  require(amplitude >= 0.0 && amplitude < 0.5, "jitter_mesh: amplitude must lie in [0, 0.5)");
  if (amplitude == 0.0) return mesh;

  const auto nv = mesh.vertices.size();
  std::vector<double> h(nv, std::numeric_limits<double>::infinity());
  const int nve = mesh.vertices_per_element();
  for (const auto& el : mesh.elements) {
    for (int a = 0; a < nve; ++a) {
      const auto va = static_cast<std::size_t>(el[static_cast<std::size_t>(a)]);
      const auto vb = static_cast<std::size_t>(el[static_cast<std::size_t>((a + 1) % nve)]);
      const double len = (mesh.vertices[va] - mesh.vertices[vb]).norm();
      h[va] = std::min(h[va], len);
      h[vb] = std::min(h[vb], len);
    }
  }
  const auto fixed = boundary_vertices(mesh);

  double amp = amplitude;
  for (int attempt = 0; attempt <= 5; ++attempt, amp *= 0.5) {
    Mesh out = mesh;
    Lcg64 rng(seed);
    for (std::size_t v = 0; v < nv; ++v) {
      if (fixed[v]) continue;
      const double dx = (2.0 * rng.unit() - 1.0) * amp * h[v];
      const double dy = (2.0 * rng.unit() - 1.0) * amp * h[v];
      out.vertices[v].x() += dx;
      if (mesh.dim == 2) out.vertices[v].y() += dy;
    }
    if (min_jacobian(out) > 0.0) {
      out.descriptor.jitter_amplitude = amplitude;
      out.descriptor.jitter_seed = seed;
      return out;
    }
  }
  fail(ErrorKind::Computation,
       "jitter_mesh: could not keep Jacobians positive after 5 amplitude halvings");
}

namespace {

Mesh subdivide(const Mesh& mesh, int f) {
  Mesh out;
  out.dim = mesh.dim;
  out.vertices = mesh.vertices;
  out.descriptor = mesh.descriptor;

  if (mesh.dim == 1) {
    std::vector<int> first(mesh.elements.size());
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const auto& el = mesh.elements[static_cast<std::size_t>(e)];
      const Point& a = mesh.vertices[static_cast<std::size_t>(el[0])];
      const Point& b = mesh.vertices[static_cast<std::size_t>(el[1])];
      int prev = el[0];
      first[static_cast<std::size_t>(e)] = out.num_elements();
      for (int k = 1; k <= f; ++k) {
        int next = el[1];
        if (k < f) {
          next = out.num_vertices();
          out.vertices.push_back(a + (b - a) * (static_cast<double>(k) / f));
        }
        out.elements.push_back({prev, next, -1, -1});
        prev = next;
      }
    }
    for (const auto& be : mesh.boundary) {
      BoundaryEdge nb = be;
      nb.element = first[static_cast<std::size_t>(be.element)] + (be.local_edge == 0 ? 0 : f - 1);
      out.boundary.push_back(nb);
    }
    return out;
  }

  std::map<std::tuple<int, int, int>, int> edge_points;
  std::vector<int> first(mesh.elements.size());
  const auto uf = static_cast<std::size_t>(f);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    const ElementMap map(mesh, e);
    std::vector<int> grid((uf + 1) * (uf + 1), -1);
    auto g = [&](int a, int b) -> int& { return grid[static_cast<std::size_t>(a + b * (f + 1))]; };
    g(0, 0) = el[0];
    g(f, 0) = el[1];
    g(f, f) = el[2];
    g(0, f) = el[3];

    auto edge_vertex = [&](int va, int vb, int t) {
      const int lo = std::min(va, vb), hi = std::max(va, vb);
      const int pos = (va < vb) ? t : f - t;
      auto [it, inserted] = edge_points.try_emplace({lo, hi, pos}, out.num_vertices());
      if (inserted) {
        const Point& pa = mesh.vertices[static_cast<std::size_t>(lo)];
        const Point& pb = mesh.vertices[static_cast<std::size_t>(hi)];
        out.vertices.push_back(pa + (pb - pa) * (static_cast<double>(pos) / f));
      }
      return it->second;
    };
    for (int t = 1; t < f; ++t) {
      g(t, 0) = edge_vertex(el[0], el[1], t);
      g(f, t) = edge_vertex(el[1], el[2], t);
      g(f - t, f) = edge_vertex(el[2], el[3], t);
      g(0, f - t) = edge_vertex(el[3], el[0], t);
    }
    for (int b = 1; b < f; ++b) {
      for (int a = 1; a < f; ++a) {
        g(a, b) = out.num_vertices();
        out.vertices.push_back(map.point(-1.0 + 2.0 * a / f, -1.0 + 2.0 * b / f));
      }
    }
    first[static_cast<std::size_t>(e)] = out.num_elements();
    for (int b = 0; b < f; ++b) {
      for (int a = 0; a < f; ++a) {
        out.elements.push_back({g(a, b), g(a + 1, b), g(a + 1, b + 1), g(a, b + 1)});
      }
    }
  }
  for (const auto& be : mesh.boundary) {
    const int base = first[static_cast<std::size_t>(be.element)];
    for (int t = 0; t < f; ++t) {
      int a = 0, b = 0;
      switch (be.local_edge) {
        case 0: a = t; b = 0; break;
        case 1: a = f - 1; b = t; break;
        case 2: a = f - 1 - t; b = f - 1; break;
        default: a = 0; b = f - 1 - t; break;
      }
      BoundaryEdge nb = be;
      nb.element = base + a + b * f;
      out.boundary.push_back(nb);
    }
  }
  return out;
}

}  // namespace

Mesh refine(const Mesh& mesh, int factor) {
  require(factor >= 2, "refine: factor must be >= 2");
  const MeshDescriptor& d = mesh.descriptor;
  if (d.kind == MeshKind::Imported) return subdivide(mesh, factor);

  MeshDescriptor fine = d;
  fine.nx *= factor;
  fine.ny *= factor;
  fine.hole_n *= factor;
  Mesh out = build_mesh(fine);

  // Carry Neumann tags over: a refined boundary edge inherits the tag of the
  // parent edge it lies on.
  std::vector<std::pair<Point, Point>> neumann;
  for (const auto& be : mesh.boundary) {
    if (be.tag != BoundaryTag::Neumann) continue;
    const ElementMap map(mesh, be.element);
    if (mesh.dim == 1) {
      const Point x = map.point(be.local_edge == 0 ? -1.0 : 1.0);
      neumann.emplace_back(x, x);
    } else {
      const auto a = edge_point(be.local_edge, -1.0), b = edge_point(be.local_edge, 1.0);
      neumann.emplace_back(map.point(a[0], a[1]), map.point(b[0], b[1]));
    }
  }
  if (!neumann.empty()) {
    const double tol = 1e-10;
    tag_boundary(out, [&](const Point& x) {
      for (const auto& [a, b] : neumann) {
        const Point ab = b - a;
        const double len2 = ab.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        if ((a + t * ab - x).norm() < tol) return true;
      }
      return false;
    }, BoundaryTag::Neumann);
  }
  return out;
}

void tag_boundary(Mesh& mesh, const std::function<bool(const Point&)>& where, BoundaryTag tag) {
  for (auto& be : mesh.boundary) {
    const ElementMap map(mesh, be.element);
    Point mid;
    if (mesh.dim == 1) {
      mid = map.point(be.local_edge == 0 ? -1.0 : 1.0);
    } else {
      const auto xi = edge_point(be.local_edge, 0.0);
      mid = map.point(xi[0], xi[1]);
    }
    if (where(mid)) be.tag = tag;
  }
}

// ---------------------------------------------------------------------------
// DOF numbering

std::vector<int> edge_local_nodes(int dim, int order, int edge) {
  const int m = order + 1;
  if (dim == 1) return {edge == 0 ? 0 : order};
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int t = 0; t <= order; ++t) {
    int j = 0, k = 0;
    switch (edge) {
      case 0: j = t; k = 0; break;
      case 1: j = order; k = t; break;
      case 2: j = order - t; k = order; break;
      case 3: j = 0; k = order - t; break;
      default: fail(ErrorKind::InvalidArgument, "edge_local_nodes: edge out of range");
    }
    out.push_back(j + k * m);
  }
  return out;
}

DofMap build_dof_map(const Mesh& mesh, int order) {
  require(order >= 1, "build_dof_map: order must be >= 1");
  DofMap dm;
  dm.order = order;
  dm.dim = mesh.dim;
  const int p = order, m = p + 1;
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_elements();
  const SpectralBasis basis(order);
  const auto nodes = basis.nodes();

  if (mesh.dim == 1) {
    dm.nodes_per_element = m;
    dm.num_nodes = nv + ne * (p - 1);
    dm.element_nodes.resize(static_cast<std::size_t>(ne * m));
    for (int e = 0; e < ne; ++e) {
      const auto& el = mesh.elements[static_cast<std::size_t>(e)];
      auto out = dm.element_nodes.begin() + e * m;
      out[0] = el[0];
      out[p] = el[1];
      for (int j = 1; j < p; ++j) out[j] = nv + e * (p - 1) + (j - 1);
    }
  } else {
    dm.nodes_per_element = m * m;
    std::map<std::pair<int, int>, int> edge_ids;
    for (const auto& el : mesh.elements) {
      for (std::size_t a = 0; a < 4; ++a) {
        const int va = el[a], vb = el[(a + 1) % 4];
        edge_ids.try_emplace({std::min(va, vb), std::max(va, vb)},
                             static_cast<int>(edge_ids.size()));
      }
    }
    const int n_edges = static_cast<int>(edge_ids.size());
    const int interior_base = nv + n_edges * (p - 1);
    dm.num_nodes = interior_base + ne * (p - 1) * (p - 1);
    dm.element_nodes.resize(static_cast<std::size_t>(ne) * static_cast<std::size_t>(m * m));

    for (int e = 0; e < ne; ++e) {
      const auto& el = mesh.elements[static_cast<std::size_t>(e)];
      auto out = dm.element_nodes.begin() + static_cast<std::ptrdiff_t>(e) * m * m;
      auto edge_node = [&](int va, int vb, int t) {
        const int id = edge_ids.at({std::min(va, vb), std::max(va, vb)});
        const int pos = (va < vb) ? t - 1 : p - 1 - t;
        return nv + id * (p - 1) + pos;
      };
      for (int k = 0; k <= p; ++k) {
        for (int j = 0; j <= p; ++j) {
          int g = 0;
          if (j == 0 && k == 0) g = el[0];
          else if (j == p && k == 0) g = el[1];
          else if (j == p && k == p) g = el[2];
          else if (j == 0 && k == p) g = el[3];
          else if (k == 0) g = edge_node(el[0], el[1], j);
          else if (j == p) g = edge_node(el[1], el[2], k);
          else if (k == p) g = edge_node(el[2], el[3], p - j);
          else if (j == 0) g = edge_node(el[3], el[0], p - k);
          else g = interior_base + e * (p - 1) * (p - 1) + (j - 1) + (k - 1) * (p - 1);
          out[j + k * m] = g;
        }
      }
    }
  }

  dm.node_coords.assign(static_cast<std::size_t>(dm.num_nodes), Point::Zero());
  std::vector<bool> seen(static_cast<std::size_t>(dm.num_nodes), false);
  for (int e = 0; e < ne; ++e) {
    const ElementMap map(mesh, e);
    const auto ids = dm.element(e);
    for (int i = 0; i < dm.nodes_per_element; ++i) {
      const auto g = static_cast<std::size_t>(ids[static_cast<std::size_t>(i)]);
      if (seen[g]) continue;
      seen[g] = true;
      const double xi = nodes[static_cast<std::size_t>(i % m)];
      const double eta = mesh.dim == 1 ? 0.0 : nodes[static_cast<std::size_t>(i / m)];
      dm.node_coords[g] = map.point(xi, eta);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    fail(ErrorKind::Internal, "build_dof_map: some nodes are not referenced by any element");
  }

  std::map<int, BoundaryNode> bnodes;
  for (const auto& be : mesh.boundary) {
    const auto ids = dm.element(be.element);
    for (int local : edge_local_nodes(mesh.dim, p, be.local_edge)) {
      const int g = ids[static_cast<std::size_t>(local)];
      auto [it, inserted] = bnodes.try_emplace(g, BoundaryNode{g, be.tag, be.region});
      if (!inserted && be.tag == BoundaryTag::Dirichlet &&
          it->second.tag != BoundaryTag::Dirichlet) {
        it->second = BoundaryNode{g, be.tag, be.region};
      }
    }
  }
  dm.boundary_nodes.reserve(bnodes.size());
  for (const auto& [g, bn] : bnodes) dm.boundary_nodes.push_back(bn);
  return dm;
}

const char* to_string(MeshKind kind) noexcept {
  switch (kind) {
    case MeshKind::Interval: return "interval";
    case MeshKind::Rectangle: return "rectangle";
    case MeshKind::Hole: return "hole";
    case MeshKind::Imported: return "imported";
  }
  return "imported";
}

MeshKind mesh_kind_from_string(const std::string& name) {
  if (name == "interval") return MeshKind::Interval;
  if (name == "rectangle") return MeshKind::Rectangle;
  if (name == "hole") return MeshKind::Hole;
  if (name == "imported") return MeshKind::Imported;
  fail(ErrorKind::InvalidArgument, "unknown mesh kind '" + name + "'");
}

}  // namespace dmpfem
