#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numbers>
#include <set>

#include "support.hpp"
#include "thicktri/delaunay.hpp"
#include "thicktri/errors.hpp"

namespace thicktri {
namespace {

// Euclidean circumcircle in Poincare coordinates: hyperbolic circles are Euclidean
// circles there, so emptiness can be checked without hyperbolic routines.
struct Disk {
  double x, y, r2;
  bool ok;
};

Disk euclidean_circumdisk(const Vec& a, const Vec& b, const Vec& c) {
  const double d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
  if (std::abs(d) < 1e-300) return {0, 0, 0, false};
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  const double ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
  const double uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
  const double r2 = (a[0] - ux) * (a[0] - ux) + (a[1] - uy) * (a[1] - uy);
  return {ux, uy, r2, true};
}

TEST(Delaunay, H2MatchesBruteForceTriangleEnumeration) {
  const PointSet ps = testing::random_separated(2, 40, 1.2, 0.15, 5);
  const PatchDomain dom = PatchDomain::centered(2, 1.3, 0.5);
  const SimplexComplex sc = build_delaunay(ps, {dom});
  std::vector<Vec> z;
  for (const auto& p : ps.points) z.push_back(to_poincare(p));
  const int m = static_cast<int>(z.size());

  std::set<Simplex> expected;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        const Disk disk = euclidean_circumdisk(z[i], z[j], z[k]);
        if (!disk.ok) continue;
        bool empty = true;
        for (int q = 0; q < m && empty; ++q) {
          if (q == i || q == j || q == k) continue;
          const double dx = z[q][0] - disk.x, dy = z[q][1] - disk.y;
          if (dx * dx + dy * dy < disk.r2 * (1 - 1e-12)) empty = false;
        }
        const std::vector<HPoint> tri{ps.points[i], ps.points[j], ps.points[k]};
        if (empty && circumball_interior(tri, dom)) expected.insert({i, j, k});
      }
    }
  }
  std::set<Simplex> interior;
  const auto& top = sc.top_cells();
  for (std::size_t c = 0; c < top.size(); ++c) {
    if (sc.interior()[c]) interior.insert(top[c]);
  }
  EXPECT_FALSE(expected.empty());
  EXPECT_EQ(interior, expected);
}

TEST(Delaunay, OracleAcceptsRandomPatches) {
  for (int n : {2, 3}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const PointSet ps = testing::random_separated(n, 120, 1.0, 0.08, seed);
      const SimplexComplex sc = build_delaunay(ps, {PatchDomain::centered(n, 1.0, 0.5)});
      EXPECT_TRUE(is_delaunay(sc, ps)) << "n = " << n << ", seed = " << seed;
      EXPECT_TRUE(non_delaunay_cells(sc, ps).empty());
      // Cells are sorted and sized n + 1; ridges have at most two cofaces.
      std::map<Simplex, int> ridge_count;
      for (const auto& cell : sc.top_cells()) {
        ASSERT_EQ(static_cast<int>(cell.size()), n + 1);
        EXPECT_TRUE(std::is_sorted(cell.begin(), cell.end()));
        for (int drop = 0; drop <= n; ++drop) {
          Simplex r = cell;
          r.erase(r.begin() + drop);
          ++ridge_count[r];
        }
      }
      for (const auto& [r, c] : ridge_count) EXPECT_LE(c, 2);
    }
  }
}

TEST(Delaunay, OracleFlagsAPlantedViolation) {
  const PointSet ps = testing::random_separated(2, 60, 1.0, 0.1, 9);
  const SimplexComplex sc = build_delaunay(ps, {PatchDomain::centered(2, 1.0, 0.5)});
  const auto& top = sc.top_cells();
  std::size_t c = 0;
  while (c < top.size() && !sc.interior()[c]) ++c;
  ASSERT_LT(c, top.size());
  std::vector<HPoint> cell;
  for (int id : top[c]) cell.push_back(ps.points[id]);
  // Put an extra sample at the circumcenter of an interior cell.
  PointSet bad = ps;
  bad.points.push_back(circumsphere(cell).center);
  EXPECT_FALSE(is_delaunay(sc, bad));
  EXPECT_EQ(non_delaunay_cells(sc, bad).size() >= 1, true);
}

TEST(Delaunay, FacesAndStarsAreConsistent) {
  const PointSet ps = testing::random_separated(3, 80, 0.8, 0.1, 3);
  const SimplexComplex sc = build_delaunay(ps);
  const auto& top = sc.top_cells();
  for (int k = 1; k <= 3; ++k) {
    const auto& faces = sc.cells(k);
    EXPECT_TRUE(std::is_sorted(faces.begin(), faces.end()));
    EXPECT_EQ(std::adjacent_find(faces.begin(), faces.end()), faces.end());
  }
  for (int v = 0; v < static_cast<int>(ps.size()); ++v) {
    for (int c : sc.star(v)) EXPECT_TRUE(std::binary_search(top[c].begin(), top[c].end(), v));
  }
  for (const auto& edge : sc.cells(1)) {
    const auto cof = sc.cofaces(edge);
    EXPECT_FALSE(cof.empty());
    for (int c : cof) EXPECT_TRUE(std::includes(top[c].begin(), top[c].end(), edge.begin(), edge.end()));
  }
  EXPECT_THROW(sc.cells(0), UsageError);
  EXPECT_THROW(sc.cells(4), UsageError);
}

TEST(Delaunay, TooFewPointsGiveNoCells) {
  PointSet ps;
  ps.n = 3;
  ps.points = {HPoint::origin(3), testing::polar(testing::axis(3, 0), 0.1)};
  const SimplexComplex sc = build_delaunay(ps);
  EXPECT_TRUE(sc.top_cells().empty());
  EXPECT_TRUE(sc.interior().empty());
}

TEST(Delaunay, CocircularInputIsResolved) {
  // A regular polygon on a hyperbolic circle plus its center.
  PointSet ps;
  ps.n = 2;
  ps.points.push_back(HPoint::origin(2));
  for (int i = 0; i < 8; ++i) {
    Vec d(2);
    d << std::cos(std::numbers::pi * i / 4), std::sin(std::numbers::pi * i / 4);
    ps.points.push_back(testing::polar(d, 0.3));
  }
  for (int i = 0; i < 12; ++i) {
    Vec d(2);
    d << std::cos(std::numbers::pi * i / 6), std::sin(std::numbers::pi * i / 6);
    ps.points.push_back(testing::polar(d, 0.6));
  }
  const SimplexComplex sc = build_delaunay(ps);
  EXPECT_TRUE(is_delaunay(sc, ps));
  // The 8 triangles around the center are forced.
  EXPECT_EQ(sc.star(0).size(), 8u);
}

TEST(MoveVertex, EqualsRebuild) {
  for (int n : {2, 3}) {
    PointSet ps = testing::random_separated(n, 100, 0.9, 0.1, 21 + n);
    const PatchDomain dom = PatchDomain::centered(n, 0.9, 0.5);
    SimplexComplex sc = build_delaunay(ps, {dom});
    Rng rng(n);
    int changed = 0;
    for (int t = 0; t < 60; ++t) {
      const int v = static_cast<int>(rng.next() % ps.size());
      const double step = t % 3 == 0 ? 0.04 : 1e-4;
      const HPoint target = sample_in_ball(ps.points[v], step, rng);
      changed += sc.move_vertex(v, target) ? 1 : 0;
      ps.points[v] = target;
      const SimplexComplex fresh = build_delaunay(ps, {dom});
      ASSERT_TRUE(same_combinatorics(sc, fresh)) << "n = " << n << ", move " << t;
      EXPECT_EQ(sc.interior(), fresh.interior());
      EXPECT_EQ(sc.point(v), target);
    }
    EXPECT_GT(changed, 0);
    EXPECT_EQ(sc.move_counters().moves, 60u);
  }
}

TEST(MoveVertex, FunctionalFormLeavesInputUntouched) {
  const PointSet ps = testing::random_separated(2, 50, 0.8, 0.1, 8);
  const SimplexComplex sc = build_delaunay(ps);
  const auto before = sc.top_cells();
  const HPoint target = testing::polar(testing::axis(2, 0), 0.01);
  const SimplexComplex moved = move_vertex(sc, 0, target);
  EXPECT_EQ(sc.top_cells(), before);
  EXPECT_EQ(sc.point(0), ps.points[0]);
  EXPECT_EQ(moved.point(0), target);
}

TEST(MoveVertex, RejectsLargeDisplacement) {
  const PointSet ps = testing::random_separated(2, 30, 0.8, 0.1, 8);
  SimplexComplex sc = build_delaunay(ps);
  const HPoint far = sample_in_ball(ps.points[0], 0.5, *std::make_unique<Rng>(1));
  EXPECT_THROW(sc.move_vertex(0, far, 1e-6), UsageError);
  EXPECT_EQ(sc.point(0), ps.points[0]);
}

TEST(FromCells, RoundTripsAndRetriangulatesOnMove) {
  PointSet ps = testing::random_separated(3, 60, 0.8, 0.1, 14);
  const PatchDomain dom = PatchDomain::centered(3, 0.8, 0.5);
  const SimplexComplex built = build_delaunay(ps, {dom});
  SimplexComplex loaded = SimplexComplex::from_cells(ps, built.top_cells(), dom);
  EXPECT_TRUE(same_combinatorics(built, loaded));
  EXPECT_EQ(built.interior(), loaded.interior());
  EXPECT_EQ(built.cells(2), loaded.cells(2));
  Rng rng(2);
  const HPoint target = sample_in_ball(ps.points[5], 0.03, rng);
  loaded.move_vertex(5, target);
  ps.points[5] = target;
  EXPECT_TRUE(same_combinatorics(loaded, build_delaunay(ps, {dom})));
}

}  // namespace
}  // namespace thicktri
