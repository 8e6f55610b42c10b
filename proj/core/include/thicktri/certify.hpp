#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "thicktri/delaunay.hpp"
#include "thicktri/quality.hpp"

namespace thicktri {

struct CellRecord {
  Simplex vertices;
  std::vector<double> edges;
  double circumradius = 0.0;  ///< negative when the circumsphere is unbounded
  double min_altitude = 0.0;
  double min_dihedral = 0.0;
  double max_dihedral = 0.0;
  double bilipschitz = 0.0;
  bool good = false;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

struct CertReport {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;  ///< altitude level audited
  std::map<int, double> achieved_d;
  std::vector<CellRecord> cells;  ///< interior top cells, in top_cells() order
  std::size_t interior_count = 0;
  std::size_t good_count = 0;
  std::vector<Simplex> failing;
  bool pass = false;
  bool vacuous = false;
  double L_estimate = 1.0;
  int grid_depth = 4;
  Histogram altitude_histogram;
  Histogram dihedral_histogram;
  std::vector<std::string> warnings;
};

/// Audits every interior top cell against is_good(a, b, d) with d = achieved_d[n]
/// (or params.d[n] when absent; failing both, the deepest known level, with a warning).
/// Read-only.
CertReport certify(const SimplexComplex& complex, const QualityParams& params,
                   const std::map<int, double>& achieved_d, int grid_depth = 4);

/// Distortion of the Klein-affine map from the simplex to the unit-edge regular
/// Euclidean simplex, sampled on a barycentric grid of the given depth. >= 1.
double bilipschitz_estimate(std::span<const HPoint> vertices, int grid_depth = 4);

}  // namespace thicktri
