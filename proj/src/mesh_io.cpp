#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dmpfem/error.hpp"
#include "dmpfem/mesh.hpp"

namespace dmpfem {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << mesh.dim << ' ' << mesh.num_elements() << ' ' << mesh.num_vertices() << '\n';
  for (const auto& v : mesh.vertices) {
    out << fmt17(v.x());
    if (mesh.dim == 2) out << ' ' << fmt17(v.y());
    out << '\n';
  }
  for (const auto& el : mesh.elements) {
    out << el[0] << ' ' << el[1];
    if (mesh.dim == 2) out << ' ' << el[2] << ' ' << el[3];
    out << '\n';
  }
  for (const auto& be : mesh.boundary) {
    out << be.element << ' ' << be.local_edge << ' '
        << (be.tag == BoundaryTag::Dirichlet ? 'D' : 'N') << ' ' << be.region << '\n';
  }
}

Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  int ne = 0, nv = 0;
  if (!(in >> mesh.dim >> ne >> nv) || (mesh.dim != 1 && mesh.dim != 2) || ne < 1 || nv < 2) {
    fail(ErrorKind::Io, "read_mesh: bad header (expected `dim ne nv`)");
  }
  mesh.vertices.resize(static_cast<std::size_t>(nv));
  for (auto& v : mesh.vertices) {
    double x = 0.0, y = 0.0;
    if (!(in >> x) || (mesh.dim == 2 && !(in >> y))) fail(ErrorKind::Io, "read_mesh: truncated vertex list");
    v = Point(x, y);
  }
  mesh.elements.resize(static_cast<std::size_t>(ne));
  for (auto& el : mesh.elements) {
    el = {-1, -1, -1, -1};
    for (int a = 0; a < mesh.vertices_per_element(); ++a) {
      if (!(in >> el[static_cast<std::size_t>(a)])) fail(ErrorKind::Io, "read_mesh: truncated element list");
      if (el[static_cast<std::size_t>(a)] < 0 || el[static_cast<std::size_t>(a)] >= nv) {
        fail(ErrorKind::Io, "read_mesh: element references a missing vertex");
      }
    }
  }
  BoundaryEdge be;
  char tag = 'D';
  while (in >> be.element >> be.local_edge >> tag >> be.region) {
    if (be.element < 0 || be.element >= ne || be.local_edge < 0 ||
        be.local_edge >= (mesh.dim == 1 ? 2 : 4) || (tag != 'D' && tag != 'N')) {
      fail(ErrorKind::Io, "read_mesh: bad boundary line");
    }
    be.tag = tag == 'D' ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
    mesh.boundary.push_back(be);
  }
  if (!in.eof()) fail(ErrorKind::Io, "read_mesh: trailing garbage after boundary lines");
  mesh.descriptor.kind = MeshKind::Imported;
  if (min_jacobian(mesh) <= 0.0) fail(ErrorKind::Mesh, "read_mesh: inverted or degenerate element");
  return mesh;
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return read_mesh(in);
}

}  // namespace dmpfem
