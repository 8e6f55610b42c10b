#pragma once

#include <map>
#include <span>
#include <vector>

#include "thicktri/hyperbolic.hpp"

namespace thicktri {

/// Parameter set of the construction: epsilon = mu/100, delta = epsilon/10,
/// a = epsilon - 2 delta, b = 2 epsilon + 2 delta, c = epsilon + delta,
/// delta_k = delta / (100 * 2^k). d holds the altitude targets d_2 >= d_3 >= ... .
struct QualityParams {
  int n = 2;
  double mu = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::map<int, double> d;
  std::map<int, double> delta_k;

  /// Fills everything except d_3..d_n; d_2 is the triangle altitude bound h0(a, b, c).
  static QualityParams from_mu(int n, double mu);
  static QualityParams from_epsilon(int n, double epsilon) { return from_mu(n, 100.0 * epsilon); }

  double delta_at(int k) const;
  double d_at(int k) const;

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
};

/// Pairwise distances, ascending.
std::vector<double> edge_lengths(std::span<const HPoint> vertices);

/// Distance from vertex i to the geodesic span of the other vertices.
double altitude(std::span<const HPoint> vertices, int i);
std::vector<double> altitudes(std::span<const HPoint> vertices);
double min_altitude(std::span<const HPoint> vertices);

/// Radius of the circumsphere inside the simplex's own geodesic span.
double circumradius_k(std::span<const HPoint> vertices);

/// Edges in [a, b] and every altitude >= d. For two vertices only the edge is checked.
bool is_good(std::span<const HPoint> vertices, double a, double b, double d);

/// p lies in the (a, b, c, d)-bad region of `facet`: the simplex [p, facet] has every
/// edge in [a, b], circumradius <= c, and p is closer than d to the span of `facet`.
bool in_bad_region(const HPoint& p, std::span<const HPoint> facet, double a, double b, double c, double d);

/// Like in_bad_region but any altitude of [p, facet] below d counts, not only the
/// altitude of p.
bool forms_bad_simplex(const HPoint& p, std::span<const HPoint> facet, double a, double b, double c, double d);

/// Dihedral angles between facet pairs of a simplex (vertex angles for triangles).
std::vector<double> dihedral_angles(std::span<const HPoint> vertices);

}  // namespace thicktri
