#include "thicktri/quality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thicktri/bounds.hpp"
#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

bool edges_within(std::span<const HPoint> v, double a, double b) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double e = hdist(v[i], v[j]);
      if (e < a || e > b) return false;
    }
  }
  return true;
}

bool circumradius_at_most(std::span<const HPoint> v, double c) {
  try {
    return circumsphere(v).radius <= c;
  } catch (const DegeneracyError&) {
    // Flat or unbounded: no finite sphere of radius <= c passes through the vertices.
    return false;
  }
}

}  // namespace

QualityParams QualityParams::from_mu(int n, double mu) {
  if (n < 2 || n > kMaxDim) throw UsageError("QualityParams: unsupported dimension " + std::to_string(n));
  if (!(mu > 0.0) || !std::isfinite(mu)) throw UsageError("QualityParams: mu must be positive");
  QualityParams q;
  q.n = n;
  q.mu = mu;
  q.epsilon = mu / 100.0;
  q.delta = q.epsilon / 10.0;
  q.a = q.epsilon - 2.0 * q.delta;
  q.b = 2.0 * q.epsilon + 2.0 * q.delta;
  q.c = q.epsilon + q.delta;
  for (int k = 2; k <= n; ++k) q.delta_k[k] = q.delta / (100.0 * std::ldexp(1.0, k));
  q.d[2] = h0_bound(q.a, q.b, q.c);
  return q;
}

double QualityParams::delta_at(int k) const {
  if (k < 2) throw UsageError("QualityParams::delta_at: k must be at least 2");
  return delta / (100.0 * std::ldexp(1.0, k));
}

double QualityParams::d_at(int k) const {
  const auto it = d.find(k);
  if (it == d.end()) throw UsageError("QualityParams: no altitude target for dimension " + std::to_string(k));
  return it->second;
}

void QualityParams::validate() const {
  auto fail = [](const std::string& what) { throw ValidationError("QualityParams: " + what); };
  if (n < 2 || n > kMaxDim) fail("dimension out of range");
  if (!(mu > 0.0)) fail("mu must be positive");
  const double tol = 1e-12 * std::max(1.0, mu);
  if (std::abs(epsilon - mu / 100.0) > tol) fail("epsilon = mu/100");
  if (std::abs(delta - epsilon / 10.0) > tol) fail("delta = epsilon/10");
  if (std::abs(a - (epsilon - 2.0 * delta)) > tol) fail("a = epsilon - 2 delta");
  if (std::abs(b - (2.0 * epsilon + 2.0 * delta)) > tol) fail("b = 2 epsilon + 2 delta");
  if (std::abs(c - (epsilon + delta)) > tol) fail("c = epsilon + delta");
  for (const auto& [k, v] : delta_k) {
    if (std::abs(v - delta / (100.0 * std::ldexp(1.0, k))) > tol) fail("delta_k = delta/(100 2^k)");
  }
  double prev = 0.0;
  bool first = true;
  for (const auto& [k, v] : d) {
    if (!(v > 0.0)) fail("d_" + std::to_string(k) + " must be positive");
    if (!first && v > prev) fail("d schedule must be non-increasing");
    prev = v;
    first = false;
  }
}

std::vector<double> edge_lengths(std::span<const HPoint> vertices) {
  std::vector<double> out;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) out.push_back(hdist(vertices[i], vertices[j]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double altitude(std::span<const HPoint> vertices, int i) {
  const int m = static_cast<int>(vertices.size());
  if (m < 2) throw UsageError("altitude: need at least two vertices");
  if (i < 0 || i >= m) throw UsageError("altitude: vertex index out of range");
  std::vector<HPoint> face;
  face.reserve(m - 1);
  for (int j = 0; j < m; ++j) {
    if (j != i) face.push_back(vertices[j]);
  }
  return dist_to_span(vertices[i], face);
}

std::vector<double> altitudes(std::span<const HPoint> vertices) {
  std::vector<double> out(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) out[i] = altitude(vertices, static_cast<int>(i));
  return out;
}

double min_altitude(std::span<const HPoint> vertices) {
  const auto h = altitudes(vertices);
  return *std::min_element(h.begin(), h.end());
}

double circumradius_k(std::span<const HPoint> vertices) { return circumsphere(vertices).radius; }

bool is_good(std::span<const HPoint> vertices, double a, double b, double d) {
  if (vertices.size() < 2) throw UsageError("is_good: need at least two vertices");
  if (!edges_within(vertices, a, b)) return false;
  if (vertices.size() == 2) return true;
  try {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (altitude(vertices, static_cast<int>(i)) < d) return false;
    }
  } catch (const DegeneracyError&) {
    return false;
  }
  return true;
}

bool in_bad_region(const HPoint& p, std::span<const HPoint> facet, double a, double b, double c, double d) {
  if (facet.empty()) throw UsageError("in_bad_region: empty facet");
  std::vector<HPoint> simplex(facet.begin(), facet.end());
  simplex.insert(simplex.begin(), p);
  if (!edges_within(simplex, a, b)) return false;
  if (!circumradius_at_most(simplex, c)) return false;
  return dist_to_span(p, facet) < d;
}

bool forms_bad_simplex(const HPoint& p, std::span<const HPoint> facet, double a, double b, double c, double d) {
  if (facet.empty()) throw UsageError("forms_bad_simplex: empty facet");
  std::vector<HPoint> simplex(facet.begin(), facet.end());
  simplex.insert(simplex.begin(), p);
  if (!edges_within(simplex, a, b)) return false;
  if (!circumradius_at_most(simplex, c)) return false;
  try {
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (altitude(simplex, static_cast<int>(i)) < d) return true;
    }
  } catch (const DegeneracyError&) {
    return true;
  }
  return false;
}

std::vector<double> dihedral_angles(std::span<const HPoint> vertices) {
  const int m = static_cast<int>(vertices.size());
  if (m < 3) throw UsageError("dihedral_angles: need at least three vertices");
  std::vector<double> out;
  if (m == 3) {
    out.push_back(angle_at_vertex(vertices[0], vertices[1], vertices[2]));
    out.push_back(angle_at_vertex(vertices[1], vertices[2], vertices[0]));
    out.push_back(angle_at_vertex(vertices[2], vertices[0], vertices[1]));
    return out;
  }
  const int ambient = vertices[0].dim() + 1;
  Mat basis(ambient, m);
  for (int i = 0; i < m; ++i) basis.col(i) = vertices[i].coords();
  // Inward unit normals of the facets inside the simplex's own span.
  std::vector<Vec> normals(m);
  std::vector<HPoint> face;
  for (int i = 0; i < m; ++i) {
    face.clear();
    for (int j = 0; j < m; ++j) {
      if (j != i) face.push_back(vertices[j]);
    }
    Vec u = hyperplane_span(face, basis).normal();
    if (minkowski_dot(vertices[i].coords(), u) < 0.0) u = -u;
    normals[i] = u;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double cosine = std::clamp(-minkowski_dot(normals[i], normals[j]), -1.0, 1.0);
      out.push_back(std::acos(cosine));
    }
  }
  return out;
}

}  // namespace thicktri
