#pragma once

// Shared constructions for the tests. Oracles here use only coordinates and
// closed-form trigonometry, never the library's own distance or span routines.

#include <cmath>
#include <vector>

#include "thicktri/hyperbolic.hpp"
#include "thicktri/net.hpp"
#include "thicktri/rng.hpp"

namespace thicktri::testing {

/// acosh(-<x,y>) in long double.
inline double oracle_dist(const HPoint& x, const HPoint& y) {
  long double q = -static_cast<long double>(x[0]) * y[0];
  for (int i = 1; i <= x.dim(); ++i) q += static_cast<long double>(x[i]) * y[i];
  const long double c = -q;
  return static_cast<double>(std::acosh(std::max<long double>(1.0L, c)));
}

/// Point at distance r from the origin in direction `dir` (unit Euclidean vector).
inline HPoint polar(const Vec& dir, double r) {
  Vec x(dir.size() + 1);
  x[0] = std::cosh(r);
  x.tail(dir.size()) = std::sinh(r) * dir;
  return HPoint::from_coords(x);
}

inline Vec axis(int n, int i) {
  Vec e = Vec::Zero(n);
  e[i] = 1.0;
  return e;
}

inline Vec random_direction(int n, Rng& rng) {
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

/// Uniform-in-radius random point within `radius` of the origin (not volume-uniform).
inline HPoint random_point(int n, double radius, Rng& rng) {
  return polar(random_direction(n, rng), radius * rng.uniform());
}

/// Random point set in the ball of radius `radius` about the origin with pairwise
/// distance at least `sep`; rejection, so keep the count modest.
inline PointSet random_separated(int n, int count, double radius, double sep, std::uint64_t seed) {
  Rng rng(seed);
  PointSet ps;
  ps.n = n;
  ps.epsilon = sep;
  ps.seed = seed;
  int attempts = 0;
  while (static_cast<int>(ps.points.size()) < count && attempts < 200000) {
    ++attempts;
    const HPoint p = random_point(n, radius, rng);
    bool ok = true;
    for (const auto& q : ps.points) {
      if (oracle_dist(p, q) < sep) {
        ok = false;
        break;
      }
    }
    if (ok) ps.points.push_back(p);
  }
  return ps;
}

/// Triangle in H^2 (embedded in the first two axes of H^n) with vertex 0 at the
/// origin, vertex 1 on the first axis at distance `c0`, and vertex 2 at distance `b0`
/// from vertex 0 making angle `gamma` with the first axis.
inline std::vector<HPoint> triangle_sas(int n, double c0, double b0, double gamma) {
  Vec d2 = Vec::Zero(n);
  d2[0] = std::cos(gamma);
  d2[1] = std::sin(gamma);
  return {HPoint::origin(n), polar(axis(n, 0), c0), polar(d2, b0)};
}

/// Regular n-simplex with circumcenter at the origin and circumradius r.
inline std::vector<HPoint> regular_simplex(int n, double r) {
  // Vertices of a regular Euclidean simplex on the unit sphere of R^n.
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n + 1, n + 1);
  e.colwise() -= Eigen::VectorXd::Constant(n + 1, 1.0 / (n + 1));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(e.leftCols(n));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n + 1, n);
  const Eigen::MatrixXd v = q.transpose() * e;
  std::vector<HPoint> out;
  for (int i = 0; i <= n; ++i) {
    Vec dir = v.col(i);
    out.push_back(polar(dir / dir.norm(), r));
  }
  return out;
}

}  // namespace thicktri::testing
