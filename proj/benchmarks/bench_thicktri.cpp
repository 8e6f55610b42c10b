#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "thicktri/bounds.hpp"
#include "thicktri/delaunay.hpp"
#include "thicktri/net.hpp"
#include "thicktri/perturb.hpp"
#include "thicktri/predicates.hpp"

using namespace thicktri;

namespace {

const PointSet& net(int n, double radius) {
  static std::map<std::pair<int, double>, PointSet> cache;
  auto it = cache.find({n, radius});
  if (it == cache.end()) {
    it = cache.emplace(std::pair{n, radius}, sample_maximal_net(PatchDomain::centered(n, radius, 0.5), 0.05, 1)).first;
  }
  return it->second;
}

}  // namespace

static void BM_Hdist(benchmark::State& state) {
  Rng rng(1);
  const HPoint x = sample_in_ball(HPoint::origin(3), 1.0, rng);
  const HPoint y = sample_in_ball(HPoint::origin(3), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hdist(x, y));
}
BENCHMARK(BM_Hdist);

static void BM_InSphere(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(2);
  std::vector<std::vector<double>> pts(d + 2, std::vector<double>(d));
  for (auto& p : pts) {
    for (auto& x : p) x = rng.uniform(-0.5, 0.5);
  }
  std::vector<const double*> cell;
  for (int i = 0; i <= d; ++i) cell.push_back(pts[i].data());
  std::vector<int> ids(d + 1);
  for (int i = 0; i <= d; ++i) ids[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(predicates::in_sphere(cell, ids, pts[d + 1].data(), d + 1, d));
}
BENCHMARK(BM_InSphere)->Arg(2)->Arg(3)->Arg(4);

static void BM_InSphereExact(benchmark::State& state) {
  // Cocircular input forces the rational path.
  std::vector<std::vector<double>> cell{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
  std::vector<double> q{0.0, -1.0};
  std::vector<const double*> ptrs{cell[0].data(), cell[1].data(), cell[2].data()};
  for (auto _ : state) benchmark::DoNotOptimize(predicates::in_sphere_exact(ptrs, q.data(), 2));
}
BENCHMARK(BM_InSphereExact);

static void BM_BuildDelaunay(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointSet& ps = net(n, n == 2 ? 2.0 : 0.8);
  for (auto _ : state) benchmark::DoNotOptimize(build_delaunay(ps).top_cells().size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
  state.counters["points"] = static_cast<double>(ps.size());
}
BENCHMARK(BM_BuildDelaunay)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_MoveVertex(benchmark::State& state) {
  const PointSet& ps = net(3, 0.8);
  SimplexComplex sc = build_delaunay(ps);
  Rng rng(3);
  const double radius = state.range(0) == 0 ? 1e-6 : 0.02;
  for (auto _ : state) {
    const int v = static_cast<int>(rng.next() % ps.size());
    sc.move_vertex(v, sample_in_ball(ps.points[v], radius, rng));
  }
  state.counters["star_rebuilds"] = static_cast<double>(sc.move_counters().rebuilt_stars);
}
BENCHMARK(BM_MoveVertex)->Arg(0)->Arg(1);

static void BM_CandidateSimplices(benchmark::State& state) {
  const PatchDomain dom = PatchDomain::centered(3, 0.6, 0.5);
  const PointSet& ps = net(3, 0.6);
  const StageState st(build_delaunay(ps, {dom}), 2, 1, Mode::adaptive);
  const QualityParams q = QualityParams::from_mu(3, 5.0);
  int v = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(candidate_simplices(v, st, q).size());
    v = (v + 1) % static_cast<int>(ps.size());
  }
}
BENCHMARK(BM_CandidateSimplices);

static void BM_ComputeLedger(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_ledger(3, 5.0).d.size());
}
BENCHMARK(BM_ComputeLedger)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
