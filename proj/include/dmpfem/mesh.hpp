#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace dmpfem {

using Point = Eigen::Vector2d;

enum class BoundaryTag { Dirichlet, Neumann };

/// Region ids carried by boundary edges; the hole builder marks the inner
/// boundary so Dirichlet data can differ between the two loops.
inline constexpr int kOuterRegion = 0;
inline constexpr int kInnerRegion = 1;

struct BoundaryEdge {
  int element = 0;
  int local_edge = 0;  // quad: 0 bottom, 1 right, 2 top, 3 left; interval: 0 left, 1 right
  BoundaryTag tag = BoundaryTag::Dirichlet;
  int region = kOuterRegion;

  bool operator==(const BoundaryEdge&) const = default;
};

enum class MeshKind { Interval, Rectangle, Hole, Imported };

/// How a mesh was built. Refinement and jitter replay from this record so a
/// refined jittered mesh is the jitter of the refined parent.
struct MeshDescriptor {
  MeshKind kind = MeshKind::Imported;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  int nx = 1;  // elements along x (interval: element count)
  int ny = 1;
  int hole_n = 1;
  double jitter_amplitude = 0.0;
  std::uint64_t jitter_seed = 0;

  bool operator==(const MeshDescriptor&) const = default;
};

/// Conforming interval (dim 1) or quadrilateral (dim 2) mesh. Quads list their
/// vertices counter-clockwise; intervals use the first two slots.
struct Mesh {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> elements;
  std::vector<BoundaryEdge> boundary;
  MeshDescriptor descriptor;

  [[nodiscard]] int num_elements() const noexcept { return static_cast<int>(elements.size()); }
  [[nodiscard]] int num_vertices() const noexcept { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int vertices_per_element() const noexcept { return dim == 1 ? 2 : 4; }

  bool operator==(const Mesh&) const = default;
};

Mesh build_interval_mesh(double a, double b, int ne);
Mesh build_rect_mesh(double x0, double y0, double x1, double y1, int nx, int ny);

/// [0,1]^2 minus the open square (4/9, 5/9)^2 on a 9n x 9n grid. Inner edges
/// carry kInnerRegion.
Mesh build_hole_mesh(int n);

/// Rebuild from a descriptor (builder + optional jitter).
Mesh build_mesh(const MeshDescriptor& descriptor);

/// Seeded 64-bit LCG used for jitter: state = a * state + c (mod 2^64) with
/// a = 6364136223846793005, c = 1442695040888963407; the unit draw is the top
/// 53 bits scaled by 2^-53. The first draw advances the seed once.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() noexcept {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }
  double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Displace interior vertices by uniform offsets of at most
/// amplitude * (shortest incident edge) per coordinate. Halves the amplitude
/// (up to 5 times) until every element has positive Jacobian.
Mesh jitter_mesh(const Mesh& mesh, double amplitude, std::uint64_t seed);

/// Split each element factor x factor (factor pieces in 1D).
Mesh refine(const Mesh& mesh, int factor);

/// Retag boundary edges whose midpoint satisfies `where`.
void tag_boundary(Mesh& mesh, const std::function<bool(const Point&)>& where,
                  BoundaryTag tag);

/// Affine (1D) or bilinear (2D) map from the master element. For 1D the
/// Jacobian is embedded as diag(h/2, 1).
class ElementMap {
 public:
  ElementMap(const Mesh& mesh, int element);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] Point point(double xi, double eta = 0.0) const;
  [[nodiscard]] Eigen::Matrix2d jacobian(double xi, double eta = 0.0) const;
  [[nodiscard]] double det(double xi, double eta = 0.0) const;
  [[nodiscard]] Eigen::Matrix2d inverse_transpose(double xi, double eta = 0.0) const;
  [[nodiscard]] const Point& corner(int i) const { return corners_[static_cast<std::size_t>(i)]; }

 private:
  int dim_;
  std::array<Point, 4> corners_;
};

ElementMap element_map(const Mesh& mesh, int element);

/// Smallest det J over the corners of every element (bilinear det J has no
/// xi*eta term, so corners bound it).
double min_jacobian(const Mesh& mesh);

/// Master-element coordinates of local edge `edge` at parameter s in [-1,1],
/// traversed counter-clockwise.
std::array<double, 2> edge_point(int edge, double s);

struct EdgeFrame {
  Point normal;        // unit outward normal
  double line_factor;  // |dx/ds|, the arc-length Jacobian
};

/// Outward normal and arc-length factor of a quad edge at parameter s.
EdgeFrame edge_frame(const ElementMap& map, int edge, double s);

struct BoundaryNode {
  int node = 0;
  BoundaryTag tag = BoundaryTag::Dirichlet;
  int region = kOuterRegion;
};

/// C0 numbering of the order-p GLL nodes. Element-local node order follows
/// i = j + k (p+1) with j along xi and k along eta.
struct DofMap {
  int order = 1;
  int dim = 2;
  int nodes_per_element = 0;
  int num_nodes = 0;
  std::vector<int> element_nodes;
  std::vector<Point> node_coords;
  std::vector<BoundaryNode> boundary_nodes;  // one entry per node; Dirichlet wins at corners

  [[nodiscard]] std::span<const int> element(int e) const {
    return std::span<const int>(element_nodes)
        .subspan(static_cast<std::size_t>(e) * static_cast<std::size_t>(nodes_per_element),
                 static_cast<std::size_t>(nodes_per_element));
  }
};

DofMap build_dof_map(const Mesh& mesh, int order);

/// Local node indices along a local edge, in counter-clockwise order.
std::vector<int> edge_local_nodes(int dim, int order, int edge);

/// Plain-text mesh format: a `dim ne nv` header, nv vertex lines, ne element
/// lines, then any number of `element local_edge D|N region` boundary lines.
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

const char* to_string(MeshKind kind) noexcept;
MeshKind mesh_kind_from_string(const std::string& name);

}  // namespace dmpfem
