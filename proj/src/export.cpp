#include "dmpfem/export.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmpfem/error.hpp"

namespace dmpfem {

VizMesh build_viz(const FieldSolution& sol) {
  VizMesh viz;
  viz.dim = sol.dim();
  const Mesh& mesh = *sol.mesh;
  const bool flux = sol.has_flux();

  std::vector<double> s;
  if (viz.dim == 1) {
    for (int a = 0; a < kVizPoints1d; ++a) s.push_back(-1.0 + 2.0 * a / (kVizPoints1d - 1));
  } else {
    const auto g = shared_basis(kVizOrder2d).nodes();
    s.assign(g.begin(), g.end());
  }
  const int n = static_cast<int>(s.size());
  const int per_element = viz.dim == 1 ? n : n * n;

  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap map(mesh, e);
    const int base = e * per_element;
    const Eigen::MatrixXd vals = element_grid_values(sol, sol.concentration, e, s, s);
    std::array<Eigen::MatrixXd, 2> q;
    if (flux) {
      for (int a = 0; a < viz.dim; ++a) q[static_cast<std::size_t>(a)] = element_grid_values(sol, sol.flux.col(a), e, s, s);
    }
    if (viz.dim == 1) {
      for (int a = 0; a < n; ++a) {
        viz.points.push_back(map.point(s[static_cast<std::size_t>(a)]));
        viz.values.push_back(vals(a, 0));
        if (flux) viz.flux.emplace_back(q[0](a, 0), 0.0);
      }
      for (int a = 0; a + 1 < n; ++a) viz.cells.push_back({base + a, base + a + 1, 0, 0});
      continue;
    }
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        viz.points.push_back(map.point(s[static_cast<std::size_t>(a)], s[static_cast<std::size_t>(b)]));
        viz.values.push_back(vals(a, b));
        if (flux) viz.flux.emplace_back(q[0](a, b), q[1](a, b));
      }
    }
    for (int b = 0; b + 1 < n; ++b) {
      for (int a = 0; a + 1 < n; ++a) {
        const int i = base + a + b * n;
        viz.cells.push_back({i, i + 1, i + 1 + n, i + n});
      }
    }
  }
  viz.violation.reserve(viz.values.size());
  for (double v : viz.values) viz.violation.push_back(v < -kNegativeTolerance ? 1 : 0);
  return viz;
}

// ---------------------------------------------------------------------------
// VTK

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "' for reading");
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

std::string expect_word(std::istream& in, const std::string& want) {
  std::string w;
  if (!(in >> w) || (!want.empty() && w != want)) {
    fail(ErrorKind::Io, "VTK: expected '" + want + "', got '" + w + "'");
  }
  return w;
}

double read_double(std::istream& in) {
  std::string w;
  if (!(in >> w)) fail(ErrorKind::Io, "VTK: unexpected end of file");
  return parse_real(w);
}

long long read_int(std::istream& in) {
  long long v = 0;
  if (!(in >> v)) fail(ErrorKind::Io, "VTK: expected an integer");
  return v;
}

}  // namespace

void write_vtk(const VizMesh& viz, std::ostream& out) {
  const std::size_t np = viz.points.size();
  const int k = viz.cell_size();
  out << "# vtk DataFile Version 3.0\n"
      << "dmpfem solution\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << np << " double\n";
  for (const auto& p : viz.points) out << g17(p.x()) << ' ' << g17(p.y()) << " 0\n";
  out << "CELLS " << viz.cells.size() << ' ' << viz.cells.size() * static_cast<std::size_t>(k + 1) << '\n';
  for (const auto& c : viz.cells) {
    out << k;
    for (int i = 0; i < k; ++i) out << ' ' << c[static_cast<std::size_t>(i)];
    out << '\n';
  }
  out << "CELL_TYPES " << viz.cells.size() << '\n';
  for (std::size_t i = 0; i < viz.cells.size(); ++i) out << (viz.dim == 1 ? 3 : 9) << '\n';
  if (np == 0) return;
  out << "POINT_DATA " << np << '\n';
  out << "SCALARS concentration double 1\nLOOKUP_TABLE default\n";
  for (double v : viz.values) out << g17(v) << '\n';
  out << "SCALARS violation int 1\nLOOKUP_TABLE default\n";
  for (auto m : viz.violation) out << static_cast<int>(m) << '\n';
  if (!viz.flux.empty()) {
    out << "VECTORS flux double\n";
    for (const auto& q : viz.flux) out << g17(q.x()) << ' ' << g17(q.y()) << " 0\n";
  }
}

void write_vtk(const VizMesh& viz, const std::string& path) {
  auto out = open_out(path);
  write_vtk(viz, out);
  finish(out, path);
}

VizMesh read_vtk(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) fail(ErrorKind::Io, "VTK: missing version line");
  std::getline(in, line);  // title
  expect_word(in, "ASCII");
  expect_word(in, "DATASET");
  expect_word(in, "UNSTRUCTURED_GRID");

  VizMesh viz;
  expect_word(in, "POINTS");
  const auto np = static_cast<std::size_t>(read_int(in));
  expect_word(in, "");
  viz.points.resize(np);
  for (auto& p : viz.points) {
    p.x() = read_double(in);
    p.y() = read_double(in);
    read_double(in);
  }
  expect_word(in, "CELLS");
  const auto nc = static_cast<std::size_t>(read_int(in));
  read_int(in);
  viz.cells.resize(nc, {0, 0, 0, 0});
  int k = 4;
  for (auto& c : viz.cells) {
    k = static_cast<int>(read_int(in));
    if (k != 2 && k != 4) fail(ErrorKind::Io, "VTK: only line and quad cells are supported");
    for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = static_cast<int>(read_int(in));
  }
  expect_word(in, "CELL_TYPES");
  read_int(in);
  int type = 9;
  for (std::size_t i = 0; i < nc; ++i) type = static_cast<int>(read_int(in));
  viz.dim = (nc > 0 && type == 3) ? 1 : 2;

  std::string word;
  while (in >> word) {
    if (word == "POINT_DATA") {
      read_int(in);
    } else if (word == "SCALARS") {
      std::string name, kind;
      in >> name >> kind;
      read_int(in);
      expect_word(in, "LOOKUP_TABLE");
      expect_word(in, "");
      if (name == "concentration") {
        viz.values.resize(np);
        for (auto& v : viz.values) v = read_double(in);
      } else if (name == "violation") {
        viz.violation.resize(np);
        for (auto& v : viz.violation) v = static_cast<std::uint8_t>(read_int(in));
      } else {
        fail(ErrorKind::Io, "VTK: unknown scalar array '" + name + "'");
      }
    } else if (word == "VECTORS") {
      std::string name, kind;
      in >> name >> kind;
      viz.flux.resize(np);
      for (auto& q : viz.flux) {
        q.x() = read_double(in);
        q.y() = read_double(in);
        read_double(in);
      }
    } else {
      fail(ErrorKind::Io, "VTK: unexpected section '" + word + "'");
    }
  }
  return viz;
}

VizMesh read_vtk(const std::string& path) {
  auto in = open_in(path);
  return read_vtk(in);
}

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec == std::errc() && res.ptr == end) return v;
  // from_chars rejects the inf/nan spellings some writers produce.
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan" || text == "-nan") return std::numeric_limits<double>::quiet_NaN();
  fail(ErrorKind::Io, "not a number: '" + text + "'");
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << "\r\n";
}

bool read_record(std::istream& in, std::vector<std::string>& fields) {
  std::string line;
  if (!std::getline(in, line)) return false;
  // Quoted fields may span lines.
  auto quotes = [](const std::string& s) { return std::count(s.begin(), s.end(), '"'); };
  while (quotes(line) % 2 == 1) {
    std::string more;
    if (!std::getline(in, more)) fail(ErrorKind::Io, "CSV: unterminated quoted field");
    line += '\n' + more;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  fields = split_csv_record(line);
  return true;
}

const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h = {"level", "formulation", "min_concentration", "min_x", "min_y", "p",
                                             "elements"};
  return h;
}

const std::vector<std::string>& dmp_header() {
  static const std::vector<std::string> h = {
      "min_value",    "min_x",        "min_y",       "max_value",         "max_x",   "max_y",
      "boundary_min", "boundary_max", "interior_min", "interior_max",     "has_interior",
      "negative_fraction", "samples", "eval_density", "nonneg",           "mp_diffusion", "mp_decay"};
  return h;
}

void check_header(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  if (got != want) fail(ErrorKind::Io, "CSV: unexpected header");
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  write_record(out, sweep_header());
  for (const auto& r : table.rows) {
    write_record(out, {std::to_string(r.level), to_string(r.formulation), format_real(r.min_concentration),
                       format_real(r.min_location.x()), format_real(r.min_location.y()), std::to_string(r.order),
                       std::to_string(r.elements)});
  }
}

void write_csv(const SweepTable& table, const std::string& path) {
  auto out = open_out(path);
  write_csv(table, out);
  finish(out, path);
}

SweepTable read_sweep_csv(std::istream& in, SweepMode mode) {
  SweepTable t;
  t.mode = mode;
  std::vector<std::string> f;
  if (!read_record(in, f)) fail(ErrorKind::Io, "CSV: empty file");
  check_header(f, sweep_header());
  while (read_record(in, f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != sweep_header().size()) fail(ErrorKind::Io, "CSV: wrong field count");
    SweepRow r;
    r.level = std::stoi(f[0]);
    r.formulation = formulation_from_string(f[1]);
    r.min_concentration = parse_real(f[2]);
    r.min_location = Point(parse_real(f[3]), parse_real(f[4]));
    r.order = std::stoi(f[5]);
    r.elements = std::stoi(f[6]);
    t.rows.push_back(r);
  }
  return t;
}

SweepTable read_sweep_csv(const std::string& path, SweepMode mode) {
  auto in = open_in(path);
  return read_sweep_csv(in, mode);
}

void write_csv(const DmpReport& r, std::ostream& out) {
  write_record(out, dmp_header());
  write_record(out, {format_real(r.min_value), format_real(r.min_location.x()), format_real(r.min_location.y()),
                     format_real(r.max_value), format_real(r.max_location.x()), format_real(r.max_location.y()),
                     format_real(r.boundary_min), format_real(r.boundary_max), format_real(r.interior_min),
                     format_real(r.interior_max), r.has_interior ? "1" : "0", format_real(r.negative_fraction),
                     std::to_string(r.samples), std::to_string(r.eval_density), to_string(r.verdicts.nonneg),
                     to_string(r.verdicts.mp_diffusion), to_string(r.verdicts.mp_decay)});
}

void write_csv(const DmpReport& report, const std::string& path) {
  auto out = open_out(path);
  write_csv(report, out);
  finish(out, path);
}

DmpReport read_dmp_csv(std::istream& in) {
  std::vector<std::string> f;
  if (!read_record(in, f)) fail(ErrorKind::Io, "CSV: empty file");
  check_header(f, dmp_header());
  if (!read_record(in, f) || f.size() != dmp_header().size()) fail(ErrorKind::Io, "CSV: missing report row");
  DmpReport r;
  r.min_value = parse_real(f[0]);
  r.min_location = Point(parse_real(f[1]), parse_real(f[2]));
  r.max_value = parse_real(f[3]);
  r.max_location = Point(parse_real(f[4]), parse_real(f[5]));
  r.boundary_min = parse_real(f[6]);
  r.boundary_max = parse_real(f[7]);
  r.interior_min = parse_real(f[8]);
  r.interior_max = parse_real(f[9]);
  r.has_interior = f[10] == "1";
  r.negative_fraction = parse_real(f[11]);
  r.samples = std::stoll(f[12]);
  r.eval_density = std::stoi(f[13]);
  r.verdicts = {verdict_from_string(f[14]), verdict_from_string(f[15]), verdict_from_string(f[16])};
  return r;
}

// ---------------------------------------------------------------------------
// JSON

std::string dmp_report_json(const DmpReport& r) {
  nlohmann::json j;
  j["min_value"] = r.min_value;
  j["min_location"] = {r.min_location.x(), r.min_location.y()};
  j["max_value"] = r.max_value;
  j["max_location"] = {r.max_location.x(), r.max_location.y()};
  j["boundary_min"] = r.boundary_min;
  j["boundary_max"] = r.boundary_max;
  j["interior_min"] = r.interior_min;
  j["interior_max"] = r.interior_max;
  j["has_interior"] = r.has_interior;
  j["negative_fraction"] = r.negative_fraction;
  j["samples"] = r.samples;
  j["eval_density"] = r.eval_density;
  j["verdicts"] = {{"nonneg", to_string(r.verdicts.nonneg)},
                   {"mp_diffusion", to_string(r.verdicts.mp_diffusion)},
                   {"mp_decay", to_string(r.verdicts.mp_decay)}};
  return j.dump(2);
}

DmpReport dmp_report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    DmpReport r;
    r.min_value = j.at("min_value").get<double>();
    r.min_location = Point(j.at("min_location").at(0).get<double>(), j.at("min_location").at(1).get<double>());
    r.max_value = j.at("max_value").get<double>();
    r.max_location = Point(j.at("max_location").at(0).get<double>(), j.at("max_location").at(1).get<double>());
    r.boundary_min = j.at("boundary_min").get<double>();
    r.boundary_max = j.at("boundary_max").get<double>();
    r.interior_min = j.at("interior_min").get<double>();
    r.interior_max = j.at("interior_max").get<double>();
    r.has_interior = j.at("has_interior").get<bool>();
    r.negative_fraction = j.at("negative_fraction").get<double>();
    r.samples = j.at("samples").get<long long>();
    r.eval_density = j.at("eval_density").get<int>();
    const auto& v = j.at("verdicts");
    r.verdicts = {verdict_from_string(v.at("nonneg").get<std::string>()),
                  verdict_from_string(v.at("mp_diffusion").get<std::string>()),
                  verdict_from_string(v.at("mp_decay").get<std::string>())};
    return r;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::Io, std::string("DmpReport JSON: ") + ex.what());
  }
}

}  // namespace dmpfem
