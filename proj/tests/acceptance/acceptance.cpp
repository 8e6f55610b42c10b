// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   thicktri_acceptance [scratch-dir] [--only N[,N...]]

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "thicktri/bounds.hpp"
#include "thicktri/certify.hpp"
#include "thicktri/delaunay.hpp"
#include "thicktri/errors.hpp"
#include "thicktri/io.hpp"
#include "thicktri/perturb.hpp"
#include "thicktri/pipeline.hpp"

namespace fs = std::filesystem;
using namespace thicktri;
using testing::oracle_dist;
using testing::polar;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const QualityParams& params3() {
  static const QualityParams q = QualityParams::from_mu(3, 5.0);
  return q;
}

// ---------------------------------------------------------------------------
// 1. Delaunay oracle equivalence

// Empty-circumball check in Poincare coordinates, where hyperbolic spheres are
// Euclidean spheres: solve 2 (z_i - z_0) . x = |z_i|^2 - |z_0|^2.
bool euclidean_empty(const SimplexComplex& sc, const PointSet& ps, double tol) {
  const int n = ps.n;
  std::vector<Vec> z;
  for (const auto& p : ps.points) z.push_back(to_poincare(p));
  const auto& top = sc.top_cells();
  for (std::size_t c = 0; c < top.size(); ++c) {
    if (!sc.interior()[c]) continue;
    Mat m(n, n);
    Vec rhs(n);
    const Vec& z0 = z[top[c][0]];
    for (int i = 1; i <= n; ++i) {
      const Vec& zi = z[top[c][i]];
      m.row(i - 1) = 2.0 * (zi - z0).transpose();
      rhs[i - 1] = zi.squaredNorm() - z0.squaredNorm();
    }
    const Vec x = m.fullPivLu().solve(rhs);
    const double r2 = (z0 - x).squaredNorm();
    for (std::size_t q = 0; q < z.size(); ++q) {
      if (std::find(top[c].begin(), top[c].end(), static_cast<int>(q)) != top[c].end()) continue;
      if ((z[q] - x).squaredNorm() < r2 * (1.0 - tol)) return false;
    }
  }
  return true;
}

Outcome criterion_delaunay() {
  Outcome out;
  int moves = 0, cells = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int n = seed % 2 == 1 ? 2 : 3;
    const int count = 50 + static_cast<int>((seed * 97) % 251);
    const double radius = n == 2 ? 1.5 : 1.0;
    PointSet ps = testing::random_separated(n, count, radius, n == 2 ? 0.05 : 0.08, seed);
    if (static_cast<int>(ps.size()) != count) {
      out.pass = false;
      out.detail = fmt("seed %d: could only place %zu of %d points", static_cast<int>(seed), ps.size(), count);
      return out;
    }
    const PatchDomain dom = PatchDomain::centered(n, radius, 0.5);
    SimplexComplex sc = build_delaunay(ps, {dom});
    cells += static_cast<int>(sc.top_cells().size());
    if (!is_delaunay(sc, ps, 1e-9) || !euclidean_empty(sc, ps, 1e-9)) {
      out.pass = false;
      out.detail = fmt("seed %d (n = %d, %d points): non-Delaunay cell", static_cast<int>(seed), n, count);
      return out;
    }
    Rng rng(seed + 1000);
    for (int t = 0; t < 6; ++t) {
      const int v = static_cast<int>(rng.next() % ps.size());
      const HPoint target = sample_in_ball(ps.points[v], t % 2 == 0 ? 0.03 : 1e-5, rng);
      sc.move_vertex(v, target);
      ps.points[v] = target;
      ++moves;
      if (!same_combinatorics(sc, build_delaunay(ps, {dom}))) {
        out.pass = false;
        out.detail = fmt("seed %d: move %d of vertex %d differs from rebuild", static_cast<int>(seed), t, v);
        return out;
      }
    }
  }
  out.detail = fmt("50 seeds, %d cells, %d moves matched rebuilds", cells, moves);
  return out;
}

// ---------------------------------------------------------------------------
// 2 and 3. Flat tetrahedra with good faces

// Lifts a point of the plane x3 = 0 to signed distance t from it.
HPoint lift(const HPoint& q, double t) {
  Vec x = std::cosh(t) * q.coords();
  x[3] = std::sinh(t);
  return HPoint::from_coords(x);
}

HPoint on_circle(double rho, double theta) {
  Vec d(3);
  d << std::cos(theta), std::sin(theta), 0.0;
  return polar(d, rho);
}

// Four points on a circle of radius rho in the plane x3 = 0, the last lifted off the
// plane by h. Accepted when every edge is in [a, b] and every face is (a, b, d_2)-good.
std::optional<std::vector<HPoint>> flat_tetrahedron(Rng& rng, double& h) {
  const QualityParams& q = params3();
  const double rho = rng.uniform(0.03, 0.054);
  std::vector<HPoint> v;
  for (int i = 0; i < 4; ++i) v.push_back(on_circle(rho, rng.uniform(0.0, 2.0 * std::numbers::pi)));
  h = std::exp(rng.uniform(std::log(1e-8), std::log(1e-3)));
  v[3] = lift(v[3], h);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double e = oracle_dist(v[i], v[j]);
      if (e < q.a || e > q.b) return std::nullopt;
    }
  }
  for (int drop = 0; drop < 4; ++drop) {
    std::vector<HPoint> face;
    for (int i = 0; i < 4; ++i) {
      if (i != drop) face.push_back(v[i]);
    }
    if (!is_good(face, q.a, q.b, q.d_at(2))) return std::nullopt;
  }
  return v;
}

Outcome criterion_altitude_spread() {
  Outcome out;
  const QualityParams& q = params3();
  const double d2 = q.d_at(2);
  Rng rng(2024);
  int accepted = 0;
  double worst_ratio = 0.0;
  double apex_err = 0.0;
  while (accepted < 1000) {
    double h = 0.0;
    const auto tet = flat_tetrahedron(rng, h);
    if (!tet) continue;
    ++accepted;
    const auto alts = altitudes(*tet);
    apex_err = std::max(apex_err, std::abs(alts[3] - h) / h);
    const double d = *std::min_element(alts.begin(), alts.end()) * (1.0 + 1e-9);
    const double bound = d_bound(q.b, d2, d);
    for (double x : alts) {
      worst_ratio = std::max(worst_ratio, x / bound);
      if (x > bound + 1e-9) {
        out.pass = false;
        out.detail = fmt("altitude %.6e exceeds d_bound %.6e", x, bound);
        return out;
      }
    }
  }
  for (double b : {0.11, 0.5, 2.0}) {
    if (d_bound(b, d2, 0.0) != 0.0) {
      out.pass = false;
      out.detail = "d_bound(b, d2, 0) is not exactly 0";
      return out;
    }
  }
  if (apex_err > 1e-6) {
    out.pass = false;
    out.detail = fmt("constructed apex altitude disagrees with altitude(): rel err %.3e", apex_err);
    return out;
  }
  out.detail = fmt("1000 tetrahedra, max altitude / d_bound = %.4f, d_bound(.,.,0) = 0", worst_ratio);
  return out;
}

// Distance from p to the circumcircle of a triangle in H^3, from the facet plane's
// unit normal u and the in-plane circumcenter o: cosh(dist) = cosh(h) cosh(t - rho).
double distance_to_circumcircle(const HPoint& p, const std::vector<HPoint>& tri) {
  Mat rows(3, 4);
  for (int i = 0; i < 3; ++i) {
    Vec jx = tri[i].coords();
    jx[0] = -jx[0];
    rows.row(i) = jx.transpose();
  }
  Vec u = rows.fullPivLu().kernel().col(0);
  u /= std::sqrt(minkowski_dot(u, u));
  Mat sys(4, 4);
  Vec rhs(4);
  for (int i = 0; i < 3; ++i) {
    sys.row(i) = rows.row(i);
    rhs[i] = -1.0;
  }
  Vec ju = u;
  ju[0] = -ju[0];
  sys.row(3) = ju.transpose();
  rhs[3] = 0.0;
  Vec o = sys.fullPivLu().solve(rhs);
  o /= std::sqrt(-minkowski_dot(o, o));
  if (o[0] < 0) o = -o;
  const double rho = std::acosh(std::max(1.0, -minkowski_dot(o, tri[0].coords())));
  const double s = minkowski_dot(p.coords(), u);
  Vec proj = p.coords() - s * u;
  proj /= std::sqrt(-minkowski_dot(proj, proj));
  const double t = std::acosh(std::max(1.0, -minkowski_dot(o, proj)));
  return std::acosh(std::cosh(std::asinh(std::abs(s))) * std::cosh(t - rho));
}

Outcome criterion_circumsphere_distance() {
  Outcome out;
  const QualityParams& q = params3();
  const double d2 = q.d_at(2);
  Rng rng(3033);
  int accepted = 0;
  double worst_ratio = 0.0;
  while (accepted < 1000) {
    double h = 0.0;
    const auto tet = flat_tetrahedron(rng, h);
    if (!tet) continue;
    double rad = 0.0;
    try {
      rad = circumradius_k(*tet);
    } catch (const DegeneracyError&) {
      continue;
    }
    if (rad > q.c) continue;
    ++accepted;
    const auto alts = altitudes(*tet);
    const double d = *std::min_element(alts.begin(), alts.end()) * (1.0 + 1e-9);
    const double bound = r_bound(q.a, q.b, q.c, d2, d);
    for (int i = 0; i < 4; ++i) {
      std::vector<HPoint> facet;
      for (int j = 0; j < 4; ++j) {
        if (j != i) facet.push_back((*tet)[j]);
      }
      const double dist = distance_to_circumcircle((*tet)[i], facet);
      worst_ratio = std::max(worst_ratio, dist / bound);
      if (dist > bound + 1e-9) {
        out.pass = false;
        out.detail = fmt("vertex-to-circumcircle distance %.6e exceeds r_bound %.6e", dist, bound);
        return out;
      }
    }
  }
  out.detail = fmt("1000 tetrahedra with circumradius <= c, max distance / r_bound = %.4f", worst_ratio);
  return out;
}

// ---------------------------------------------------------------------------
// 4. Bad-region volume

Outcome criterion_bad_volume() {
  Outcome out;
  const QualityParams& q = params3();
  const double d2 = q.d_at(2);
  Rng rng(4044);
  std::ostringstream detail;
  detail.precision(3);
  int facets_done = 0;
  int min_hits = 1 << 30;
  for (double factor : {1e-2, 1e-3, 1e-4}) {
    const double d = factor * q.epsilon;
    const double bound = vk_bound(3, 3, q.a, q.b, q.c, d2, d);
    double worst = 0.0;
    for (int f = 0; f < 3; ++f) {
      std::vector<HPoint> facet;
      double rho = 0.0;
      // Four admissible points on one circle with the last dropped, so the facet's
      // circumcircle has room for an apex and the region is not empty.
      for (bool ok = false; !ok;) {
        rho = rng.uniform(0.5 * q.a, q.c);
        facet.clear();
        for (int i = 0; i < 4; ++i) facet.push_back(on_circle(rho, rng.uniform(0.0, 2.0 * std::numbers::pi)));
        ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
          for (int j = i + 1; j < 4 && ok; ++j) {
            const double e = oracle_dist(facet[i], facet[j]);
            ok = e >= q.a && e <= q.b;
          }
        }
        facet.pop_back();
        ok = ok && is_good(facet, q.a, q.b, d2);
      }
      // The region hugs the facet circumcircle: apexes off the circle push the
      // circumradius past c. Sample Fermi coordinates (r, theta, t) about the facet
      // plane, with volume element cosh^2(t) sinh(r), over |r - rho| < w, |t| < d, and
      // widen w until no hit lies in its outer half.
      const int samples = 100000;
      double est = 0.0, sigma = 0.0;
      int hits = 0;
      for (double w = 4.0 * d;; w *= 2.0) {
        Rng mc(derive_seed(4044, static_cast<std::uint64_t>(facets_done)));
        const double lo = std::max(0.0, rho - w), hi = rho + w;
        const double box = (hi - lo) * 2.0 * std::numbers::pi * 2.0 * d;
        double sum = 0.0, sum2 = 0.0, reach = 0.0;
        hits = 0;
        for (int s = 0; s < samples; ++s) {
          const double r = mc.uniform(lo, hi);
          const double t = mc.uniform(-d, d);
          const HPoint p = lift(on_circle(r, mc.uniform(0.0, 2.0 * std::numbers::pi)), t);
          if (!in_bad_region(p, facet, q.a, q.b, q.c, d)) continue;
          const double wt = std::cosh(t) * std::cosh(t) * std::sinh(r);
          sum += wt;
          sum2 += wt * wt;
          reach = std::max(reach, std::abs(r - rho));
          ++hits;
        }
        const double mean = sum / samples;
        const double var = std::max(0.0, sum2 / samples - mean * mean);
        est = box * mean;
        sigma = box * std::sqrt(var / samples);
        if (reach < 0.5 * w || lo == 0.0) break;
      }
      ++facets_done;
      if (hits == 0) {
        out.pass = false;
        out.detail = fmt("d = %.1e eps: no sample hit the bad region", factor);
        return out;
      }
      if (est + 3.0 * sigma > bound) {
        out.pass = false;
        out.detail = fmt("d = %.1e eps: volume %.4e + 3 sigma %.4e exceeds vk_bound %.4e", factor, est, sigma, bound);
        return out;
      }
      min_hits = std::min(min_hits, hits);
      worst = std::max(worst, (est + 3.0 * sigma) / bound);
    }
    detail << "d=" << factor << "eps: (V+3s)/vk<=" << worst << "; ";
  }
  out.detail = detail.str() + fmt("1e5 samples per facet, 3 facets per level, >= %d hits each", min_hits);
  return out;
}

// ---------------------------------------------------------------------------
// 5. Candidate counts

Outcome criterion_candidates() {
  Outcome out;
  const QualityParams& q = params3();
  // Derived oracle: floor((cosh 0.11 - 1) / (cosh 0.02 - 1)).
  const auto m2 = static_cast<std::uint64_t>(std::floor((std::cosh(0.11) - 1.0) / (std::cosh(0.02) - 1.0)));
  if (m_count(2, 5.0) != 30 || m2 != 30) {
    out.pass = false;
    out.detail = fmt("m_count(2, 5) = %llu, oracle %llu, expected 30",
                     static_cast<unsigned long long>(m_count(2, 5.0)), static_cast<unsigned long long>(m2));
    return out;
  }
  std::uint64_t bound = 0;
  for (int l = 1; l <= 3; ++l) bound += n_count(3, l, 5.0);
  std::size_t worst = 0;
  std::size_t vertices = 0;
  const PatchDomain dom = PatchDomain::centered(3, 0.6, 0.5);
  for (std::uint64_t run = 1; run <= 20; ++run) {
    const PointSet ps = sample_maximal_net(dom, q.epsilon, run);
    const StageState state(build_delaunay(ps, {dom}), 2, run, Mode::adaptive);
    for (int v = 0; v < static_cast<int>(ps.size()); ++v) {
      worst = std::max(worst, candidate_simplices(v, state, q).size());
      ++vertices;
    }
  }
  if (worst > bound) {
    out.pass = false;
    out.detail = fmt("max candidates %zu exceeds bound %llu", worst, static_cast<unsigned long long>(bound));
    return out;
  }
  out.detail = fmt("20 runs, %zu vertices, max candidates %zu <= %llu; m_count(2, 5) = 30", vertices, worst,
                   static_cast<unsigned long long>(bound));
  return out;
}

// ---------------------------------------------------------------------------
// 6. Triangle altitudes

Outcome criterion_triangles() {
  Outcome out;
  const QualityParams q = QualityParams::from_mu(2, 5.0);
  const double h0 = h0_bound(q.a, q.b, q.c);
  Rng rng(6066);
  int accepted = 0, violations = 0;
  double tightest = std::numeric_limits<double>::infinity();
  double lib_err = 0.0;
  while (accepted < 10000) {
    std::vector<HPoint> tri;
    if (accepted % 2 == 0) {
      const double rho = rng.uniform(0.5 * q.a, q.c);
      for (int i = 0; i < 3; ++i) {
        Vec d(2);
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        d << std::cos(th), std::sin(th);
        tri.push_back(polar(d, rho));
      }
    } else {
      // Near-extremal: largest circle, one edge close to a.
      const double rho = q.c * (1.0 - 0.01 * rng.uniform());
      const double half = std::asin(std::min(1.0, std::sinh(0.5 * q.a * (1.0 + 0.01 * rng.uniform())) / std::sinh(rho)));
      for (double th : {0.0, 2.0 * half, rng.uniform(0.0, 2.0 * std::numbers::pi)}) {
        Vec d(2);
        d << std::cos(th), std::sin(th);
        tri.push_back(polar(d, rho));
      }
    }
    const double e01 = oracle_dist(tri[0], tri[1]);
    const double e02 = oracle_dist(tri[0], tri[2]);
    const double e12 = oracle_dist(tri[1], tri[2]);
    if (std::min({e01, e02, e12}) < q.a || std::max({e01, e02, e12}) > q.b) continue;
    ++accepted;
    // sinh(h) = sinh(side) sin(angle) with angles from the law of cosines.
    auto angle = [](double opp, double s1, double s2) {
      return std::acos(std::clamp((std::cosh(s1) * std::cosh(s2) - std::cosh(opp)) / (std::sinh(s1) * std::sinh(s2)),
                                  -1.0, 1.0));
    };
    const double A0 = angle(e12, e01, e02);
    const double A1 = angle(e02, e01, e12);
    const double h2 = std::asinh(std::sinh(e02) * std::sin(A0));
    const double h1 = std::asinh(std::sinh(e01) * std::sin(A0));
    const double h0v = std::asinh(std::sinh(e01) * std::sin(A1));
    const double m = std::min({h0v, h1, h2});
    lib_err = std::max(lib_err, std::abs(min_altitude(tri) - m) / m);
    tightest = std::min(tightest, m / h0);
    if (m < h0) ++violations;
  }
  if (violations > 0 || lib_err > 1e-6) {
    out.pass = false;
    out.detail = fmt("%d violations; library altitude rel err %.3e", violations, lib_err);
    return out;
  }
  out.detail = fmt("10000 triangles, 0 violations, min altitude / h0 = %.4f", tightest);
  return out;
}

// ---------------------------------------------------------------------------
// 7 and 9. End-to-end runs

RunConfig e2e_config(std::uint64_t seed, const fs::path& dir) {
  RunConfig c;
  c.n = 3;
  c.mu = 5.0;
  c.patch_radius = 1.0;
  c.margin = 0.5;
  c.seed = seed;
  c.mode = Mode::adaptive;
  c.plant_slivers = 3;
  c.output_dir = dir;
  return c;
}

std::optional<std::string> check_run(const RunConfig& c, const RunManifest& m, double seconds) {
  const QualityParams& q = params3();
  if (seconds > 300.0) return fmt("took %.0f s", seconds);
  if (!m.pass || m.vacuous) return std::string("certification failed or vacuous");
  const double d3 = m.achieved_d.at(3);
  if (!(d3 > 0.0)) return std::string("achieved d_3 is not positive");
  const MeshDocument initial = mesh_from_json(read_text(c.output_dir / "mesh.json"));
  const MeshDocument refined = mesh_from_json(read_text(c.output_dir / "refined.json"));
  double moved = 0.0;
  for (std::size_t i = 0; i < initial.points.size(); ++i) {
    moved = std::max(moved, oracle_dist(initial.points.points[i], refined.points.points[i]));
  }
  if (moved > q.delta) return fmt("displacement %.3e exceeds delta", moved);
  const auto& before = initial.cells[3];
  const auto& after = refined.cells[3];
  for (int j = 0; j < c.plant_slivers; ++j) {
    const Simplex s{4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3};
    const auto it = std::find(before.begin(), before.end(), s);
    if (it == before.end()) return fmt("planted sliver %d is not a cell of the initial mesh", j);
    if (!initial.interior[it - before.begin()]) return fmt("planted sliver %d is not interior", j);
    std::vector<HPoint> v;
    for (int id : s) v.push_back(initial.points.points[id]);
    if (is_good(v, q.a, q.b, d3)) return fmt("planted sliver %d was not bad initially", j);
    const auto jt = std::find(after.begin(), after.end(), s);
    if (jt != after.end()) {
      v.clear();
      for (int id : s) v.push_back(refined.points.points[id]);
      if (!is_good(v, q.a, q.b, d3)) return fmt("planted sliver %d survived refinement", j);
    }
  }
  return std::nullopt;
}

Outcome criterion_end_to_end(const fs::path& root) {
  Outcome out;
  double slowest = 0.0, min_d = 1.0, max_moved = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RunConfig c = e2e_config(seed, root / fmt("e2e-seed-%d", static_cast<int>(seed)));
    fs::remove_all(c.output_dir);
    RunManifest m;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = cmd_pipeline(c, &m);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);
    if (code != kExitPass) {
      out.pass = false;
      out.detail = fmt("seed %d: exit code %d", static_cast<int>(seed), code);
      return out;
    }
    if (auto why = check_run(c, m, secs)) {
      out.pass = false;
      out.detail = fmt("seed %d: %s", static_cast<int>(seed), why->c_str());
      return out;
    }
    min_d = std::min(min_d, m.achieved_d.at(3));
    const PointSet a = pointset_from_json(read_text(c.output_dir / "points.json"));
    const MeshDocument r = mesh_from_json(read_text(c.output_dir / "refined.json"));
    for (std::size_t i = 0; i < a.size(); ++i) max_moved = std::max(max_moved, oracle_dist(a.points[i], r.points.points[i]));
    std::printf("  seed %2d: %.1f s, d_3 = %.3e\n", static_cast<int>(seed), secs, m.achieved_d.at(3));
    std::fflush(stdout);
  }
  out.detail = fmt("10 seeds all good, min d_3 = %.3e, max displacement %.3e <= delta = %.3e, slowest %.1f s, "
                   "3 planted slivers removed per run",
                   min_d, max_moved, params3().delta, slowest);
  return out;
}

Outcome criterion_determinism(const fs::path& root) {
  Outcome out;
  const char* files[] = {"points.json", "mesh.json", "refined.json", "stages.json", "report.json", "manifest.json"};
  std::vector<RunConfig> configs;
  RunConfig planar;
  planar.n = 2;
  planar.patch_radius = 1.5;
  planar.seed = 7;
  configs.push_back(planar);
  configs.push_back(e2e_config(1, {}));
  int compared = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunConfig a = configs[i];
    RunConfig b = configs[i];
    a.output_dir = root / fmt("det-%d-a", static_cast<int>(i));
    b.output_dir = root / fmt("det-%d-b", static_cast<int>(i));
    for (const auto* c : {&a, &b}) {
      fs::remove_all(c->output_dir);
      cmd_pipeline(*c);
    }
    for (const char* f : files) {
      if (read_text(a.output_dir / f) != read_text(b.output_dir / f)) {
        out.pass = false;
        out.detail = fmt("config %d: %s differs between runs", static_cast<int>(i), f);
        return out;
      }
      ++compared;
    }
  }
  out.detail = fmt("%d artifacts bit-identical across reruns (H^2 and H^3 configs)", compared);
  return out;
}

// ---------------------------------------------------------------------------
// 8. Kernel identities

Outcome criterion_kernel() {
  Outcome out;
  double worst = 0.0;
  auto rel = [&](double x, double y) {
    const double e = std::abs(x - y) / std::max(std::abs(y), 1e-300);
    worst = std::max(worst, e);
    return e;
  };
  int checks = 0;
  const double sides[] = {0.01, 0.1, 0.5, 1.0, 2.0, 3.0};
  const double angles[] = {0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  for (double b0 : sides) {
    for (double c0 : sides) {
      for (double g : angles) {
        const auto tri = testing::triangle_sas(2, c0, b0, g);
        // Law of cosines in the half-angle form: sinh^2(a/2) = sinh^2((b-c)/2) + sinh b sinh c sin^2(g/2).
        const long double sb = std::sinh(static_cast<long double>(b0 - c0) / 2);
        const long double s2 = sb * sb + std::sinh(static_cast<long double>(b0)) * std::sinh(static_cast<long double>(c0)) *
                                             std::pow(std::sin(static_cast<long double>(g) / 2), 2);
        const double a0 = static_cast<double>(2 * std::asinh(std::sqrt(s2)));
        rel(hdist(tri[1], tri[2]), a0);
        const auto ang = dihedral_angles(tri);
        rel(ang[0], g);
        // Law of sines.
        const double ratio0 = std::sin(ang[0]) / std::sinh(a0);
        rel(std::sin(ang[1]) / std::sinh(b0), ratio0);
        rel(std::sin(ang[2]) / std::sinh(c0), ratio0);
        checks += 4;
      }
    }
  }
  for (double r : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0}) {
    const long double lr = r;
    rel(ball_volume(2, r), static_cast<double>(4 * std::numbers::pi_v<long double> * std::pow(std::sinh(lr / 2), 2)));
    rel(ball_volume(3, r), static_cast<double>(std::numbers::pi_v<long double> * (std::sinh(2 * lr) - 2 * lr)));
    for (int n = 2; n <= 6; ++n) {
      const double sphere = 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
      const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [n](double t) { return std::pow(std::sinh(t), n - 1); }, 0.0, r, 15, 1e-15);
      rel(ball_volume(n, r), sphere * integral);
      rel(ball_volume_quadrature(n, r), sphere * integral);
      checks += 2;
    }
    checks += 2;
  }
  if (worst > 1e-9) {
    out.pass = false;
    out.detail = fmt("worst relative error %.3e over %d identities", worst, checks);
    return out;
  }
  out.detail = fmt("%d identities, worst relative error %.2e", checks, worst);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root = fs::temp_directory_path() / "thicktri-acceptance";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else {
      root = arg;
    }
  }
  fs::create_directories(root);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Delaunay oracle equivalence", criterion_delaunay},
      {"altitude spread of flat simplices", criterion_altitude_spread},
      {"distance to facet circumsphere", criterion_circumsphere_distance},
      {"bad-region volume", criterion_bad_volume},
      {"candidate facet counts", criterion_candidates},
      {"triangle altitude bound", criterion_triangles},
      {"end-to-end refinement in H^3", [&] { return criterion_end_to_end(root); }},
      {"kernel identities", criterion_kernel},
      {"determinism", [&] { return criterion_determinism(root); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (id == 1 && secs > 120.0) {
      o.pass = false;
      o.detail += fmt("; runtime %.0f s exceeds 120 s", secs);
    }
    std::printf("criterion %d %s: %s (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
