#pragma once

// JSON documents for point sets, meshes, certification reports and bound ledgers,
// plus OFF and SVG exports. Doubles are written in shortest round-trip form, so a
// document read back yields bit-identical values.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thicktri/bounds.hpp"
#include "thicktri/certify.hpp"
#include "thicktri/delaunay.hpp"
#include "thicktri/net.hpp"
#include "thicktri/perturb.hpp"

namespace thicktri {

/// Largest |<x,x> + 1| accepted for a loaded point, relative to x0^2.
inline constexpr double kLoadTolerance = 1e-10;

struct MeshDocument {
  PointSet points;
  std::vector<std::vector<Simplex>> cells;  ///< cells[k] for k = 1..n; cells[0] unused
  std::vector<char> interior;               ///< per top cell
  std::optional<PatchDomain> domain;
  std::map<int, double> achieved_d;
  std::optional<double> mu;

  /// Rebuilds the complex from the stored top cells.
  SimplexComplex complex() const;
};

MeshDocument make_mesh_document(const SimplexComplex& complex, const std::map<int, double>& achieved_d = {},
                                std::optional<double> mu = std::nullopt);

std::string pointset_to_json(const PointSet& ps);
/// Throws ParseError on malformed JSON and ValidationError on invariant violations.
PointSet pointset_from_json(const std::string& text);

std::string mesh_to_json(const MeshDocument& mesh);
MeshDocument mesh_from_json(const std::string& text);

std::string report_to_json(const CertReport& report);
std::string ledger_to_json(const BoundLedger& ledger);
std::string stages_to_json(const std::vector<StageReport>& stages);

/// Faces of dimension min(n, 2) in Poincare coordinates, padded to three components.
std::string mesh_to_off(const SimplexComplex& complex);

/// Poincare disk drawing of an H^2 complex. Edges are drawn as geodesic arcs; interior
/// cells are filled with a gray level proportional to their min altitude.
std::string mesh_to_svg(const SimplexComplex& complex, const CertReport* report = nullptr);

/// Throws ParseError carrying line and column when `text` is not well-formed JSON.
void check_json(const std::string& text);

/// Whole-file helpers. read_text throws UsageError when the file cannot be opened.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace thicktri
