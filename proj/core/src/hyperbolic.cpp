#include "thicktri/hyperbolic.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

constexpr double kPi = std::numbers::pi;

void check_same_size(const Vec& x, const Vec& y, const char* op) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UsageError(std::string(op) + ": dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
}

// Spatial coordinates of the points of `pts` after moving pts[0] to the origin;
// column i-1 holds point i.
Mat relative_spatial(std::span<const HPoint> pts, const Mat& to_origin) {
  const int n = pts[0].dim();
  Mat cols(n, static_cast<int>(pts.size()) - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec moved = to_origin * pts[i].coords();
    cols.col(static_cast<int>(i) - 1) = moved.tail(n);
  }
  return cols;
}

// Residual of `v` after Euclidean projection onto the column space of `cols`.
Vec orthogonal_residual(const Mat& cols, const Vec& v, const char* op) {
  if (cols.cols() == 0) return v;
  Eigen::ColPivHouseholderQR<Mat> qr(cols);
  qr.setThreshold(1e-13);
  if (qr.rank() < cols.cols()) {
    throw DegeneracyError(std::string(op) + ": face vertices are geodesically dependent");
  }
  const Mat q = qr.householderQ() * Mat::Identity(cols.rows(), cols.cols());
  Vec r = v;
  // Two passes of projection removal keep the residual orthogonal when it is tiny.
  for (int pass = 0; pass < 2; ++pass) r -= q * (q.transpose() * r);
  return r;
}

double integrate_sinh_power(int n, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const int power = n - 1;
  auto f = [power](double t) { return std::pow(std::sinh(t), power); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 10, 1e-14, &err);
}

}  // namespace

HPoint HPoint::origin(int n) {
  if (n < 1 || n > kMaxDim) throw UsageError("HPoint::origin: unsupported dimension " + std::to_string(n));
  HPoint p;
  p.coords_ = Vec::Zero(n + 1);
  p.coords_[0] = 1.0;
  return p;
}

HPoint HPoint::from_coords(const Vec& x) {
  if (x.size() < 2 || x.size() > kMaxAmbient) {
    throw UsageError("HPoint::from_coords: unsupported coordinate count " + std::to_string(x.size()));
  }
  const double q = minkowski_dot_unchecked(x, x);
  if (!(q < 0.0) || !(x[0] > 0.0) || !std::isfinite(q)) {
    throw UsageError("HPoint::from_coords: vector is not future timelike");
  }
  HPoint p;
  p.coords_ = x / std::sqrt(-q);
  p.coords_[0] = std::sqrt(1.0 + p.coords_.tail(x.size() - 1).squaredNorm());
  return p;
}

HPoint HPoint::from_coords_verbatim(const Vec& x) {
  if (x.size() < 2 || x.size() > kMaxAmbient) {
    throw UsageError("HPoint::from_coords_verbatim: unsupported coordinate count " + std::to_string(x.size()));
  }
  HPoint p;
  p.coords_ = x;
  return p;
}

HPoint HPoint::from_spatial(const Vec& spatial) {
  if (spatial.size() < 1 || spatial.size() > kMaxDim) {
    throw UsageError("HPoint::from_spatial: unsupported dimension " + std::to_string(spatial.size()));
  }
  HPoint p;
  p.coords_.resize(spatial.size() + 1);
  p.coords_[0] = std::sqrt(1.0 + spatial.squaredNorm());
  p.coords_.tail(spatial.size()) = spatial;
  return p;
}

Hyperplane Hyperplane::from_normal(const Vec& normal) {
  const double q = minkowski_dot(normal, normal);
  if (!(q > 0.0) || !std::isfinite(q)) throw UsageError("Hyperplane::from_normal: normal is not spacelike");
  Hyperplane h;
  h.normal_ = normal / std::sqrt(q);
  return h;
}

double minkowski_dot(const Vec& x, const Vec& y) {
  check_same_size(x, y, "minkowski_dot");
  return minkowski_dot_unchecked(x, y);
}

double hdist(const HPoint& x, const HPoint& y) {
  check_same_size(x.coords(), y.coords(), "hdist");
  const double c = -minkowski_dot_unchecked(x.coords(), y.coords());
  if (c >= 2.0) return std::acosh(c);
  // <x-y, x-y> = 4 sinh^2(d/2) avoids the cancellation of acosh near 1.
  const Vec diff = x.coords() - y.coords();
  const double q = std::max(0.0, minkowski_dot_unchecked(diff, diff));
  return 2.0 * std::asinh(0.5 * std::sqrt(q));
}

Vec unit_tangent(const HPoint& x, const HPoint& y) {
  check_same_size(x.coords(), y.coords(), "unit_tangent");
  const Vec delta = y.coords() - x.coords();
  Vec v = delta + minkowski_dot_unchecked(x.coords(), delta) * x.coords();
  const double q = minkowski_dot_unchecked(v, v);
  if (!(q > 0.0)) return Vec::Zero(x.coords().size());
  return v / std::sqrt(q);
}

HPoint exp_map(const HPoint& x, const Vec& tangent) {
  const double theta = std::sqrt(std::max(0.0, minkowski_dot(tangent, tangent)));
  if (theta == 0.0) return x;
  return HPoint::from_coords(std::cosh(theta) * x.coords() + (std::sinh(theta) / theta) * tangent);
}

HPoint geodesic_point(const HPoint& x, const HPoint& y, double t) {
  const double d = hdist(x, y);
  if (d == 0.0) return x;
  return exp_map(x, (t * d) * unit_tangent(x, y));
}

Hyperplane hyperplane_span(std::span<const HPoint> points) {
  if (points.empty()) throw UsageError("hyperplane_span: no points");
  const int m = points[0].dim() + 1;
  return hyperplane_span(points, Mat::Identity(m, m));
}

Hyperplane hyperplane_span(std::span<const HPoint> points, const Mat& subspace) {
  if (points.empty()) throw UsageError("hyperplane_span: no points");
  const int ambient = points[0].dim() + 1;
  if (subspace.rows() != ambient) throw UsageError("hyperplane_span: subspace basis has wrong row count");
  const int m = static_cast<int>(subspace.cols());
  const int k = static_cast<int>(points.size());
  if (k < m - 1) throw DegeneracyError("hyperplane_span: too few points to determine a hyperplane");

  Eigen::MatrixXd a(k, m);
  for (int i = 0; i < k; ++i) {
    if (points[i].dim() + 1 != ambient) throw UsageError("hyperplane_span: mixed dimensions");
    for (int j = 0; j < m; ++j) {
      a(i, j) = minkowski_dot_unchecked(points[i].coords(), subspace.col(j));
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() >= m - 1 && m >= 2 && sv[m - 2] <= 1e-12 * sv[0]) {
    throw DegeneracyError("hyperplane_span: points are affinely dependent");
  }
  Vec normal = subspace * Vec(svd.matrixV().col(m - 1));
  const double q = minkowski_dot_unchecked(normal, normal);
  if (!(q > 0.0)) throw DegeneracyError("hyperplane_span: points do not span a geodesic hyperplane");
  normal /= std::sqrt(q);
  // Sign convention: the largest-magnitude component is positive.
  Eigen::Index big = 0;
  normal.cwiseAbs().maxCoeff(&big);
  if (normal[big] < 0.0) normal = -normal;
  for (const auto& p : points) {
    if (std::abs(minkowski_dot_unchecked(p.coords(), normal)) > kGeometryTol) {
      throw DegeneracyError("hyperplane_span: points are not co-hyperplanar");
    }
  }
  return Hyperplane::from_normal(normal);
}

double signed_offset(const HPoint& p, const Hyperplane& h) { return minkowski_dot(p.coords(), h.normal()); }

double dist_to_hyperplane(const HPoint& p, const Hyperplane& h) { return std::asinh(std::abs(signed_offset(p, h))); }

HPoint project_to_hyperplane(const HPoint& p, const Hyperplane& h) {
  const double s = signed_offset(p, h);
  return HPoint::from_coords(p.coords() - s * h.normal());
}

double dist_to_span(const HPoint& p, std::span<const HPoint> face) {
  if (face.empty()) throw UsageError("dist_to_span: empty face");
  if (face.size() == 1) return hdist(p, face[0]);
  const Mat to_origin = boost_to_origin(face[0]);
  const Mat cols = relative_spatial(face, to_origin);
  const Vec moved = to_origin * p.coords();
  const Vec r = orthogonal_residual(cols, moved.tail(p.dim()), "dist_to_span");
  return std::asinh(r.norm());
}

HPoint project_to_span(const HPoint& p, std::span<const HPoint> face) {
  if (face.empty()) throw UsageError("project_to_span: empty face");
  if (face.size() == 1) return face[0];
  const int n = p.dim();
  const Mat to_origin = boost_to_origin(face[0]);
  const Mat cols = relative_spatial(face, to_origin);
  Vec moved = to_origin * p.coords();
  const Vec r = orthogonal_residual(cols, moved.tail(n), "project_to_span");
  moved.tail(n) -= r;
  return apply(boost_from_origin(face[0]), HPoint::from_coords(moved));
}

Sphere circumsphere(std::span<const HPoint> vertices) {
  if (vertices.empty()) throw UsageError("circumsphere: no vertices");
  const int n = vertices[0].dim();
  if (vertices.size() == 1) return {vertices[0], 0.0};
  const int k = static_cast<int>(vertices.size()) - 1;
  if (k > n) throw DegeneracyError("circumsphere: more than n+1 vertices");

  // Work in the frame where vertices[0] is the origin e0. With w_i = v_i - e0 the
  // center is e0 + sum beta_i w_i where <w_i, w_j> beta = <w_i, w_i> / 2.
  const Mat to_origin = boost_to_origin(vertices[0]);
  Mat w(n + 1, k);
  for (int i = 0; i < k; ++i) {
    const Vec v = to_origin * vertices[i + 1].coords();
    const double s2 = v.tail(n).squaredNorm();
    w(0, i) = s2 / (1.0 + std::sqrt(1.0 + s2));
    w.col(i).tail(n) = v.tail(n);
  }
  Mat gram(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      gram(i, j) = gram(j, i) = minkowski_dot_unchecked(w.col(i), w.col(j));
    }
  }
  Vec rhs = 0.5 * gram.diagonal();
  Eigen::FullPivLU<Mat> lu(gram);
  lu.setThreshold(1e-15);
  if (!lu.isInvertible()) throw DegeneracyError("circumsphere: vertices are geodesically dependent");
  const Vec beta = lu.solve(rhs);
  if (!beta.allFinite()) throw DegeneracyError("circumsphere: vertices are geodesically dependent");
  Vec center = Vec::Zero(n + 1);
  center[0] = 1.0;
  center += w * beta;
  const double q = minkowski_dot_unchecked(center, center);
  if (!(q < 0.0) || !(center[0] > 0.0)) {
    throw UnboundedCircumsphereError("circumsphere: circumscribing surface is not a sphere");
  }
  const HPoint local = HPoint::from_coords(center);
  const double radius = hdist(local, HPoint::origin(n));
  return {apply(boost_from_origin(vertices[0]), local), radius};
}

Mat boost_to_origin(const HPoint& p) {
  const int n = p.dim();
  const Vec s = p.spatial();
  Mat b(n + 1, n + 1);
  b(0, 0) = p[0];
  b.block(0, 1, 1, n) = -s.transpose();
  b.block(1, 0, n, 1) = -s;
  b.block(1, 1, n, n) = Mat::Identity(n, n) + (s * s.transpose()) / (1.0 + p[0]);
  return b;
}

Mat boost_from_origin(const HPoint& p) {
  const int n = p.dim();
  const Vec s = p.spatial();
  Mat b(n + 1, n + 1);
  b(0, 0) = p[0];
  b.block(0, 1, 1, n) = s.transpose();
  b.block(1, 0, n, 1) = s;
  b.block(1, 1, n, n) = Mat::Identity(n, n) + (s * s.transpose()) / (1.0 + p[0]);
  return b;
}

HPoint apply(const Mat& lorentz, const HPoint& p) {
  if (lorentz.rows() != p.coords().size() || lorentz.cols() != p.coords().size()) {
    throw UsageError("apply: transformation size mismatch");
  }
  return HPoint::from_coords(lorentz * p.coords());
}

Vec to_poincare(const HPoint& p) { return p.spatial() / (1.0 + p[0]); }

HPoint from_poincare(const Vec& x) {
  const double r2 = x.squaredNorm();
  if (!(r2 < 1.0)) throw UsageError("from_poincare: point is not inside the unit ball");
  Vec c(x.size() + 1);
  c[0] = (1.0 + r2) / (1.0 - r2);
  c.tail(x.size()) = (2.0 / (1.0 - r2)) * x;
  return HPoint::from_coords(c);
}

Vec to_klein(const HPoint& p) { return p.spatial() / p[0]; }

HPoint from_klein(const Vec& y) {
  const double r2 = y.squaredNorm();
  if (!(r2 < 1.0)) throw UsageError("from_klein: point is not inside the unit ball");
  Vec c(y.size() + 1);
  c[0] = 1.0;
  c.tail(y.size()) = y;
  return HPoint::from_coords(c / std::sqrt(1.0 - r2));
}

double unit_sphere_area(int n) {
  if (n < 1) throw UsageError("unit_sphere_area: dimension must be positive");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n, double r) {
  if (n < 2) throw UsageError("ball_volume: dimension must be at least 2");
  if (!(r >= 0.0)) throw UsageError("ball_volume: negative radius");
  if (r == 0.0) return 0.0;
  if (n == 2) {
    const double s = std::sinh(0.5 * r);
    return 4.0 * kPi * s * s;
  }
  if (n == 3) {
    const double x = 2.0 * r;
    if (x < 0.1) {
      // sinh x - x by its Taylor series.
      const double x2 = x * x;
      const double series =
          x * x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0 * (1.0 + x2 / 110.0))));
      return kPi * series;
    }
    return kPi * (std::sinh(x) - x);
  }
  return ball_volume_quadrature(n, r);
}

double ball_volume_quadrature(int n, double r) {
  if (n < 2) throw UsageError("ball_volume_quadrature: dimension must be at least 2");
  if (!(r >= 0.0)) throw UsageError("ball_volume_quadrature: negative radius");
  return unit_sphere_area(n) * integrate_sinh_power(n, 0.0, r);
}

double shell_volume(int n, double r_in, double r_out) {
  if (n < 2) throw UsageError("shell_volume: dimension must be at least 2");
  r_in = std::max(0.0, r_in);
  if (!(r_out > r_in)) return 0.0;
  return shell_volume_about(n, 0.5 * (r_out + r_in), 0.5 * (r_out - r_in));
}

double shell_volume_about(int n, double center_radius, double half_width) {
  if (n < 2) throw UsageError("shell_volume_about: dimension must be at least 2");
  if (!(center_radius >= 0.0) || !(half_width >= 0.0)) throw UsageError("shell_volume_about: negative radius");
  if (half_width == 0.0) return 0.0;
  if (half_width >= center_radius) return ball_volume(n, center_radius + half_width);
  if (n == 2) return 4.0 * kPi * std::sinh(center_radius) * std::sinh(half_width);
  if (n == 3) {
    // pi [(sinh 2r - 2r)]_{r_in}^{r_out} = 2 pi [(cosh s - 1) sinh h + (sinh h - h)]
    const double s = 2.0 * center_radius;
    const double h = 2.0 * half_width;
    const double ch = 2.0 * std::sinh(0.5 * s) * std::sinh(0.5 * s);
    double sh_minus_h;
    if (h < 0.05) {
      const double h2 = h * h;
      sh_minus_h = h * h2 / 6.0 * (1.0 + h2 / 20.0 * (1.0 + h2 / 42.0 * (1.0 + h2 / 72.0)));
    } else {
      sh_minus_h = std::sinh(h) - h;
    }
    return 2.0 * kPi * (ch * std::sinh(h) + sh_minus_h);
  }
  // Integrating in the offset t keeps thin shells resolved when c + t rounds to c. The
  // integrand is entire, so a fixed Gauss-Legendre rule is accurate to rounding.
  const int power = n - 1;
  auto f = [power, center_radius](double t) { return std::pow(std::sinh(center_radius + t), power); };
  return unit_sphere_area(n) * boost::math::quadrature::gauss<double, 30>::integrate(f, -half_width, half_width);
}

double angle_at_vertex(const HPoint& a, const HPoint& b, const HPoint& c) {
  const Vec tb = unit_tangent(a, b);
  const Vec tc = unit_tangent(a, c);
  if (tb.isZero(0.0) || tc.isZero(0.0)) throw DegeneracyError("angle_at_vertex: coincident points");
  const Vec diff = tb - tc;
  const Vec sum = tb + tc;
  const double dn = std::sqrt(std::max(0.0, minkowski_dot_unchecked(diff, diff)));
  const double sn = std::sqrt(std::max(0.0, minkowski_dot_unchecked(sum, sum)));
  return 2.0 * std::atan2(dn, sn);
}

HPoint sample_in_ball(const HPoint& center, double radius, Rng& rng) {
  return sample_in_ball(boost_from_origin(center), radius, rng);
}

HPoint sample_in_ball(const Mat& from_origin, double radius, Rng& rng) {
  const int n = static_cast<int>(from_origin.rows()) - 1;
  if (!(radius >= 0.0)) throw UsageError("sample_in_ball: negative radius");
  double r = 0.0;
  if (radius > 0.0) {
    // Radial density proportional to sinh^{n-1}(r) on [0, radius].
    const double top = std::sinh(radius);
    for (;;) {
      r = radius * rng.uniform();
      if (rng.uniform() <= std::pow(std::sinh(r) / top, n - 1)) break;
    }
  }
  Vec dir(n);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < n; ++i) dir[i] = rng.normal();
    norm2 = dir.squaredNorm();
  } while (norm2 == 0.0);
  dir /= std::sqrt(norm2);
  Vec local(n + 1);
  local[0] = std::cosh(r);
  local.tail(n) = std::sinh(r) * dir;
  return HPoint::from_coords(from_origin * local);
}

}  // namespace thicktri
