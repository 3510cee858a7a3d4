#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmpfem/analysis.hpp"

namespace dmpfem {

/// Low-order sampling of a high-order field. Each source element contributes
/// 100 uniformly spaced points (1D, 99 line cells) or the 16 x 16 GLL grid of
/// an order-15 element (2D, 15 x 15 quad cells). Points on shared element
/// edges are repeated per element.
struct VizMesh {
  int dim = 2;
  std::vector<Point> points;
  std::vector<double> values;
  std::vector<Point> flux;  // empty when the solution has no flux field
  std::vector<std::array<int, 4>> cells;  // lines use the first two slots
  std::vector<std::uint8_t> violation;    // value < -1e-13

  [[nodiscard]] int cell_size() const noexcept { return dim == 1 ? 2 : 4; }
  bool operator==(const VizMesh&) const = default;
};

inline constexpr int kVizPoints1d = 100;
inline constexpr int kVizOrder2d = 15;

VizMesh build_viz(const FieldSolution& sol);

/// Legacy ASCII VTK unstructured grid with `concentration`, `violation` and,
/// when present, `flux` point data. Reals use 17 significant digits.
void write_vtk(const VizMesh& viz, std::ostream& out);
void write_vtk(const VizMesh& viz, const std::string& path);
VizMesh read_vtk(std::istream& in);
VizMesh read_vtk(const std::string& path);

/// CSV with a header row; reals in shortest round-trip form. Sweep columns:
/// level, formulation, min_concentration, min_x, min_y, p, elements.
void write_csv(const SweepTable& table, std::ostream& out);
void write_csv(const SweepTable& table, const std::string& path);
SweepTable read_sweep_csv(std::istream& in, SweepMode mode);
SweepTable read_sweep_csv(const std::string& path, SweepMode mode);

/// One-row CSV of a DmpReport.
void write_csv(const DmpReport& report, std::ostream& out);
void write_csv(const DmpReport& report, const std::string& path);
DmpReport read_dmp_csv(std::istream& in);

/// Shortest decimal string that parses back to the same double.
std::string format_real(double v);
double parse_real(const std::string& text);

/// RFC 4180 field splitting of one record.
std::vector<std::string> split_csv_record(const std::string& line);

/// JSON text of a DmpReport (keys sorted) and its inverse.
std::string dmp_report_json(const DmpReport& report);
DmpReport dmp_report_from_json(const std::string& text);

}  // namespace dmpfem
