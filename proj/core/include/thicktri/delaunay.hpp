#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "thicktri/hyperbolic.hpp"
#include "thicktri/net.hpp"

namespace thicktri {

/// Sorted vertex ids.
using Simplex = std::vector<int>;

namespace detail {
class Triangulation;
}

struct DelaunayOptions {
  /// Sets the model frame (its center maps to the Poincare origin) and decides which
  /// top cells are interior. Without a domain the origin is the frame center.
  std::optional<PatchDomain> domain;
};

/// Delaunay complex of a point set in H^n.
///
/// The triangulation is computed in the Poincare ball as the Euclidean Delaunay
/// triangulation of the points together with a fixed enclosing simplex whose cells
/// are hidden. Cells whose circumball leaves the model ball are not hyperbolic
/// Delaunay cells; they are kept but never flagged interior.
class SimplexComplex {
 public:
  SimplexComplex();
  ~SimplexComplex();
  SimplexComplex(const SimplexComplex& other);
  SimplexComplex& operator=(const SimplexComplex& other);
  SimplexComplex(SimplexComplex&&) noexcept;
  SimplexComplex& operator=(SimplexComplex&&) noexcept;

  /// A complex given by its top cells, without an incremental engine. The first
  /// move_vertex call re-triangulates the points.
  static SimplexComplex from_cells(PointSet ps, std::vector<Simplex> top_cells,
                                   std::optional<PatchDomain> domain = std::nullopt);

  int dim() const { return points_.n; }
  const PointSet& point_set() const { return points_; }
  const HPoint& point(int id) const { return points_.points.at(id); }
  std::size_t num_vertices() const { return points_.points.size(); }
  const std::optional<PatchDomain>& domain() const { return domain_; }

  /// All k-faces of the top cells, k = 1..n, sorted.
  const std::vector<Simplex>& cells(int k) const;
  const std::vector<Simplex>& top_cells() const { return cells(dim()); }
  /// Per top cell: circumball inside the shrunk domain.
  const std::vector<char>& interior() const;
  /// Indices into top_cells() of the cells containing `face`.
  std::vector<int> cofaces(const Simplex& face) const;
  /// Indices into top_cells() of the cells containing vertex v.
  const std::vector<int>& star(int v) const;

  /// Moves vertex v and restores the Delaunay property locally. Throws UsageError when
  /// the displacement exceeds `max_displacement`. Returns true if the combinatorics changed.
  bool move_vertex(int v, const HPoint& position,
                   double max_displacement = std::numeric_limits<double>::infinity());

  struct MoveCounters {
    std::uint64_t moves = 0;
    std::uint64_t rebuilt_stars = 0;
  };
  const MoveCounters& move_counters() const { return counters_; }

  friend bool same_combinatorics(const SimplexComplex& a, const SimplexComplex& b) {
    return a.top_cells() == b.top_cells();
  }

 private:
  friend SimplexComplex build_delaunay(const PointSet& ps, const DelaunayOptions& options);

  struct Snapshot;
  const Snapshot& snapshot() const;
  void invalidate();

  PointSet points_;
  std::optional<PatchDomain> domain_;
  std::unique_ptr<detail::Triangulation> tri_;
  std::vector<Simplex> given_cells_;
  MoveCounters counters_;
  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const Snapshot> snapshot_;
};

/// Delaunay triangulation of a generic point set. Throws DegeneracyError when the
/// symbolic perturbation cannot resolve a configuration.
SimplexComplex build_delaunay(const PointSet& ps, const DelaunayOptions& options = {});

/// Functional form of SimplexComplex::move_vertex.
SimplexComplex move_vertex(const SimplexComplex& complex, int vertex_id, const HPoint& position,
                           double max_displacement = std::numeric_limits<double>::infinity());

/// Brute-force oracle: no sample lies inside the hyperbolic circumsphere of an interior
/// top cell by more than `tol`.
bool is_delaunay(const SimplexComplex& complex, const PointSet& ps, double tol = 1e-9);

/// Interior top cells whose circumsphere contains a sample by more than `tol`.
std::vector<Simplex> non_delaunay_cells(const SimplexComplex& complex, const PointSet& ps, double tol = 1e-9);

/// The interior rule: the hyperbolic circumball of `cell` lies inside the shrunk domain
/// (or, without a domain, the circumsphere is bounded).
bool circumball_interior(std::span<const HPoint> cell, const std::optional<PatchDomain>& domain);

}  // namespace thicktri
