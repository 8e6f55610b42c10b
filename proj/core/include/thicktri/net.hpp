#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "thicktri/hyperbolic.hpp"

namespace thicktri {

/// Geodesic ball of H^n. Quality guarantees apply only inside the shrunk ball of
/// radius `radius - margin`.
struct PatchDomain {
  HPoint center;
  double radius = 1.0;
  double margin = 0.5;

  static PatchDomain centered(int n, double radius, double margin) {
    return {HPoint::origin(n), radius, margin};
  }

  int dim() const { return center.dim(); }
  double inner_radius() const { return radius - margin; }
  bool contains(const HPoint& p) const { return hdist(center, p) <= radius; }
  bool in_shrunk(const HPoint& p) const { return hdist(center, p) <= inner_radius(); }

  /// radius > margin > 0 and margin >= 10 epsilon. Throws ValidationError.
  void validate(double epsilon) const;
};

struct PointSet {
  int n = 2;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<HPoint> points;

  std::size_t size() const { return points.size(); }
};

/// Bucketed lookup of points of H^n within a hyperbolic radius.
///
/// Buckets are boxes in the spatial coordinates of a frame centered at `center`.
/// Inside a ball of radius rho about the center, spatial-coordinate distances are at
/// most cosh(rho) times hyperbolic distances, which fixes the box size.
class NeighborIndex {
 public:
  NeighborIndex(const HPoint& center, double cell_radius, double max_radius);

  int insert(const HPoint& p);
  /// Moves point `id`. Buckets are not updated; queries widen by the largest drift.
  void set_position(int id, const HPoint& p);

  const HPoint& position(int id) const { return points_[id]; }
  std::size_t size() const { return points_.size(); }

  /// Ids of points with hdist(p, q) <= radius, ascending.
  std::vector<int> within(const HPoint& p, double radius) const;
  /// Smallest distance to a point within `radius`, or +infinity.
  double nearest_within(const HPoint& p, double radius) const;

 private:
  template <typename Visit>
  void visit_candidates(const HPoint& p, double radius, Visit&& visit) const;
  std::uint64_t key_of(const Vec& local_spatial) const;
  Vec local_spatial(const HPoint& p) const;

  int n_;
  Mat to_frame_;
  bool identity_frame_;
  double cell_radius_;
  double max_radius_;
  double box_;
  std::vector<HPoint> points_;
  std::vector<HPoint> bucketed_at_;
  double drift_ = 0.0;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

struct NetOptions {
  /// Samples placed before sampling starts; emitted first and verbatim.
  std::vector<HPoint> fixed;
  /// Open balls that receive no samples.
  std::vector<Sphere> exclusions;
  /// Greedy probe lattice spacing as a fraction of epsilon (spatial coordinates).
  double probe_fraction = 1.0 / 20.0;
  /// Dart-throwing trials per unit of vol(B(radius)) / vol(B(epsilon/2)).
  double dart_factor = 4.0;
};

/// Maximal epsilon-separated set in the domain ball: random darts, then greedy
/// insertion at uncovered points of a probe lattice. Deterministic in `seed`.
PointSet sample_maximal_net(const PatchDomain& domain, double epsilon, std::uint64_t seed,
                            const NetOptions& options = {});

/// Displaces each point by at most `magnitude`, keeping the set epsilon-separated.
/// Each point gets up to 100 fresh draws before the call fails with InfeasibleError.
PointSet genericity_jitter(const PointSet& ps, double magnitude, std::uint64_t seed);

/// Smallest pairwise distance (infinity for fewer than two points).
double min_separation(const PointSet& ps);

struct CoverageReport {
  std::size_t probes = 0;
  std::size_t uncovered = 0;
  double worst = 0.0;  ///< largest probe-to-nearest-sample distance
};

/// Checks every probe of the lattice with spacing `spacing` (spatial coordinates of the
/// domain frame) that lies within `probe_radius` of the center.
CoverageReport verify_covering(const PointSet& ps, const PatchDomain& domain, double spacing,
                               double probe_radius);

/// Four vertices of a flat, nearly cospherical tetrahedron about `center`: a square of
/// circumradius 0.72 epsilon in the first two axes of the center's frame, corners lifted
/// alternately by +tilt and -tilt along the third axis. `exclusion` is their circumball;
/// keeping it empty makes the tetrahedron a Delaunay cell. Requires n >= 3.
struct PlantedSliver {
  std::vector<HPoint> vertices;
  Sphere exclusion;
};
PlantedSliver planted_sliver(const HPoint& center, double epsilon, double tilt);

/// Hyperboloid barycenter of a nonempty point list.
HPoint barycenter(std::span<const HPoint> points);

}  // namespace thicktri
