#pragma once

// Hyperbolic geometry in the hyperboloid model
//   H^n = { x in R^{n+1} : <x,x> = -1, x_0 > 0 },  <x,y> = -x_0 y_0 + sum_i x_i y_i,
// with conversions to the Poincare and Klein ball models.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "thicktri/rng.hpp"

namespace thicktri {

/// Largest supported dimension of H^n.
inline constexpr int kMaxDim = 7;
inline constexpr int kMaxAmbient = kMaxDim + 1;

/// Minkowski-space vector (n+1 entries) or model-ball coordinates (n entries). Inline storage.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient>;

inline constexpr double kRepresentationTol = 1e-12;
inline constexpr double kGeometryTol = 1e-9;

/// A point of H^n on the upper sheet of the hyperboloid.
class HPoint {
 public:
  HPoint() = default;

  /// The basepoint (1, 0, ..., 0).
  static HPoint origin(int n);
  /// Rescales a future timelike vector onto the hyperboloid. Throws UsageError otherwise.
  static HPoint from_coords(const Vec& x);
  /// Point with the given spatial coordinates x_1..x_n; x_0 is recomputed.
  static HPoint from_spatial(const Vec& spatial);
  /// Takes x verbatim. The caller has already checked the hyperboloid constraint;
  /// used when reloading serialized points so that they round-trip bit for bit.
  static HPoint from_coords_verbatim(const Vec& x);

  int dim() const { return static_cast<int>(coords_.size()) - 1; }
  const Vec& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  Vec spatial() const { return coords_.tail(dim()); }

  friend bool operator==(const HPoint& a, const HPoint& b) { return a.coords_ == b.coords_; }

 private:
  Vec coords_;
};

/// Totally geodesic hyperplane { x : <x, normal> = 0 } with a spacelike unit normal.
class Hyperplane {
 public:
  Hyperplane() = default;
  /// Normalizes `normal` to <u,u> = +1. Throws UsageError if it is not spacelike.
  static Hyperplane from_normal(const Vec& normal);

  int dim() const { return static_cast<int>(normal_.size()) - 1; }
  const Vec& normal() const { return normal_; }

 private:
  Vec normal_;
};

struct Sphere {
  HPoint center;
  double radius = 0.0;
};

double minkowski_dot(const Vec& x, const Vec& y);
/// minkowski_dot without the dimension check, for inner loops.
inline double minkowski_dot_unchecked(const Vec& x, const Vec& y) {
  return -x[0] * y[0] + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

double hdist(const HPoint& x, const HPoint& y);

HPoint geodesic_point(const HPoint& x, const HPoint& y, double t);

/// Unit tangent vector at x pointing toward y. Zero when x == y.
Vec unit_tangent(const HPoint& x, const HPoint& y);
/// exp_x(v) for a tangent vector v at x (<v, x> = 0).
HPoint exp_map(const HPoint& x, const Vec& tangent);

/// Hyperplane through `points` (n points in H^n).
Hyperplane hyperplane_span(std::span<const HPoint> points);
/// Hyperplane through `points` inside the linear subspace with column basis `subspace`.
/// The returned normal lies in that subspace.
Hyperplane hyperplane_span(std::span<const HPoint> points, const Mat& subspace);

double dist_to_hyperplane(const HPoint& p, const Hyperplane& h);
/// <p, normal>; positive on the side the normal points to.
double signed_offset(const HPoint& p, const Hyperplane& h);
HPoint project_to_hyperplane(const HPoint& p, const Hyperplane& h);

/// Distance from p to the geodesic subspace spanned by `face` (altitude when `face` is
/// the opposite facet of p). Throws DegeneracyError when `face` is dependent.
double dist_to_span(const HPoint& p, std::span<const HPoint> face);
/// Foot of the perpendicular from p to the geodesic span of `face`.
HPoint project_to_span(const HPoint& p, std::span<const HPoint> face);

/// Circumsphere of k+1 vertices, centered in their geodesic span.
Sphere circumsphere(std::span<const HPoint> vertices);

/// Lorentz transformation sending p to the origin.
Mat boost_to_origin(const HPoint& p);
/// Lorentz transformation sending the origin to p.
Mat boost_from_origin(const HPoint& p);
HPoint apply(const Mat& lorentz, const HPoint& p);

Vec to_poincare(const HPoint& p);
HPoint from_poincare(const Vec& x);
Vec to_klein(const HPoint& p);
HPoint from_klein(const Vec& y);

/// Area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);
/// Volume of a ball of radius r in H^n (closed form for n = 2, 3).
double ball_volume(int n, double r);
/// Same quantity by adaptive quadrature for every n.
double ball_volume_quadrature(int n, double r);
/// Volume of { r_in <= |x| <= r_out } without cancellation.
double shell_volume(int n, double r_in, double r_out);
/// Volume of the points at distance within `half_width` of a sphere of radius
/// `center_radius`. Accurate when half_width is far below the spacing of doubles near
/// center_radius.
double shell_volume_about(int n, double center_radius, double half_width);

/// Angle at a between the geodesics [a,b] and [a,c], in [0, pi].
double angle_at_vertex(const HPoint& a, const HPoint& b, const HPoint& c);

/// Uniform sample from the hyperbolic ball B(center, radius).
HPoint sample_in_ball(const HPoint& center, double radius, Rng& rng);
/// Same, with the center given by a precomputed boost_from_origin(center).
HPoint sample_in_ball(const Mat& from_origin, double radius, Rng& rng);

}  // namespace thicktri
