#include "thicktri/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

// Vertices of a regular simplex with unit edges in R^n (columns).
Mat regular_simplex(int n) {
  // Standard basis vectors of R^{n+1} span a regular simplex of edge sqrt(2) in the
  // hyperplane sum = 1; an orthonormal basis of that hyperplane gives R^n coordinates.
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n + 1, n + 1);
  const Eigen::VectorXd centroid = Eigen::VectorXd::Constant(n + 1, 1.0 / (n + 1));
  Eigen::MatrixXd shifted = e.colwise() - centroid;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(shifted.leftCols(n));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n + 1, n);
  Mat out(n, n + 1);
  out = (q.transpose() * shifted) / std::sqrt(2.0);
  return out;
}

void enumerate_barycentric(int parts, int slots, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    cur.push_back(parts);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int i = 0; i <= parts; ++i) {
    cur.push_back(i);
    enumerate_barycentric(parts - i, slots - 1, cur, out);
    cur.pop_back();
  }
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(bins, 0);
  if (!(hi > lo)) return h;
  for (double v : values) {
    int bin = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    bin = std::clamp(bin, 0, bins - 1);
    ++h.counts[bin];
  }
  return h;
}

}  // namespace

double bilipschitz_estimate(std::span<const HPoint> vertices, int grid_depth) {
  const int n = vertices.empty() ? 0 : vertices[0].dim();
  if (static_cast<int>(vertices.size()) != n + 1) {
    throw UsageError("bilipschitz_estimate: expected a top-dimensional simplex");
  }
  if (grid_depth < 1) throw UsageError("bilipschitz_estimate: grid depth must be positive");

  HPoint center;
  try {
    center = circumsphere(vertices).center;
  } catch (const UnboundedCircumsphereError&) {
    center = barycenter(vertices);
  }
  const Mat to_origin = boost_to_origin(center);
  Mat y(n, n + 1);
  for (int i = 0; i <= n; ++i) y.col(i) = to_klein(apply(to_origin, vertices[i]));

  const Mat e = regular_simplex(n);
  Mat dy(n, n);
  Mat de(n, n);
  for (int i = 1; i <= n; ++i) {
    dy.col(i - 1) = y.col(i) - y.col(0);
    de.col(i - 1) = e.col(i) - e.col(0);
  }
  Eigen::FullPivLU<Mat> lu(dy);
  if (!lu.isInvertible()) throw DegeneracyError("bilipschitz_estimate: degenerate simplex");
  // Affine map Klein -> Euclidean: x = M (y - y_0) + e_0.
  const Mat m = de * lu.inverse();

  double worst = 1.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double len = hdist(vertices[i], vertices[j]);
      worst = std::max({worst, len, 1.0 / len});
    }
  }

  std::vector<std::vector<int>> grid;
  std::vector<int> cur;
  enumerate_barycentric(grid_depth, n + 1, cur, grid);
  for (const auto& w : grid) {
    Vec point = Vec::Zero(n);
    for (int i = 0; i <= n; ++i) point += (static_cast<double>(w[i]) / grid_depth) * y.col(i);
    const double r2 = point.squaredNorm();
    Mat g_inv_half = std::sqrt(1.0 - r2) * Mat::Identity(n, n);
    if (r2 > 0.0) {
      const Vec u = point / std::sqrt(r2);
      g_inv_half += ((1.0 - r2) - std::sqrt(1.0 - r2)) * (u * u.transpose());
    }
    Eigen::JacobiSVD<Mat> svd(m * g_inv_half);
    const auto& s = svd.singularValues();
    const double smax = s[0];
    const double smin = s[n - 1];
    if (!(smin > 0.0)) throw DegeneracyError("bilipschitz_estimate: singular differential");
    worst = std::max({worst, smax, 1.0 / smin});
  }
  return worst;
}

CertReport certify(const SimplexComplex& complex, const QualityParams& params,
                   const std::map<int, double>& achieved_d, int grid_depth) {
  CertReport rep;
  const int n = complex.dim();
  rep.n = n;
  rep.a = params.a;
  rep.b = params.b;
  rep.achieved_d = achieved_d;
  rep.grid_depth = grid_depth;
  if (auto it = achieved_d.find(n); it != achieved_d.end()) {
    rep.d = it->second;
  } else if (auto pt = params.d.find(n); pt != params.d.end()) {
    rep.d = pt->second;
  } else {
    // Unrefined input: audit at the deepest level that is known.
    const auto& known = achieved_d.empty() ? params.d : achieved_d;
    if (known.empty()) throw UsageError("certify: no altitude level for dimension " + std::to_string(n));
    rep.d = known.rbegin()->second;
    rep.warnings.push_back("no altitude level for dimension " + std::to_string(n) + "; audited at d_" +
                           std::to_string(known.rbegin()->first));
  }

  const auto& top = complex.top_cells();
  const auto& interior = complex.interior();
  std::vector<double> alts;
  std::vector<double> dihedrals;
  std::vector<HPoint> verts(n + 1);
  for (std::size_t c = 0; c < top.size(); ++c) {
    if (!interior[c]) continue;
    CellRecord rec;
    rec.vertices = top[c];
    for (int i = 0; i <= n; ++i) verts[i] = complex.point(top[c][i]);
    rec.edges = edge_lengths(verts);
    try {
      rec.circumradius = circumradius_k(verts);
    } catch (const DegeneracyError&) {
      rec.circumradius = -1.0;
    }
    try {
      rec.min_altitude = min_altitude(verts);
      const auto ang = dihedral_angles(verts);
      rec.min_dihedral = *std::min_element(ang.begin(), ang.end());
      rec.max_dihedral = *std::max_element(ang.begin(), ang.end());
      dihedrals.insert(dihedrals.end(), ang.begin(), ang.end());
      rec.bilipschitz = bilipschitz_estimate(verts, grid_depth);
      rep.L_estimate = std::max(rep.L_estimate, rec.bilipschitz);
    } catch (const DegeneracyError&) {
      rec.min_altitude = 0.0;
    }
    alts.push_back(rec.min_altitude);
    rec.good = is_good(verts, params.a, params.b, rep.d);
    ++rep.interior_count;
    if (rec.good) {
      ++rep.good_count;
    } else {
      rep.failing.push_back(rec.vertices);
    }
    rep.cells.push_back(std::move(rec));
  }
  rep.pass = rep.failing.empty();
  if (rep.interior_count == 0) {
    rep.vacuous = true;
    rep.warnings.push_back("no interior top cells; certification is vacuous");
  }
  const double alt_hi = alts.empty() ? 1.0 : *std::max_element(alts.begin(), alts.end());
  rep.altitude_histogram = make_histogram(alts, 0.0, alt_hi > 0.0 ? alt_hi : 1.0, 20);
  rep.dihedral_histogram = make_histogram(dihedrals, 0.0, std::numbers::pi, 18);
  return rep;
}

}  // namespace thicktri
