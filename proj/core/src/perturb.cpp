#include "thicktri/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thicktri/bounds.hpp"
#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

NeighborIndex make_index(const SimplexComplex& complex) {
  const int n = complex.dim();
  const HPoint center = complex.domain() ? complex.domain()->center : HPoint::origin(n);
  double reach = 0.0;
  for (const auto& p : complex.point_set().points) reach = std::max(reach, hdist(center, p));
  const double eps = complex.point_set().epsilon > 0.0 ? complex.point_set().epsilon : 0.05;
  NeighborIndex index(center, 2.0 * eps, reach + eps);
  for (const auto& p : complex.point_set().points) index.insert(p);
  return index;
}

std::vector<char> movable_vertices(const SimplexComplex& complex) {
  const auto& pts = complex.point_set().points;
  std::vector<char> movable(pts.size(), 1);
  if (const auto& dom = complex.domain()) {
    // The slack keeps vertices that may drift into the shrunk domain during refinement.
    const double limit = dom->inner_radius() + complex.point_set().epsilon / 10.0;
    for (std::size_t i = 0; i < pts.size(); ++i) movable[i] = hdist(dom->center, pts[i]) <= limit ? 1 : 0;
  }
  return movable;
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::theoretical ? "theoretical" : "adaptive"; }

Mode parse_mode(std::string_view text) {
  if (text == "theoretical") return Mode::theoretical;
  if (text == "adaptive") return Mode::adaptive;
  throw UsageError("unknown mode '" + std::string(text) + "' (expected theoretical or adaptive)");
}

StageState::StageState(SimplexComplex c, int stage, std::uint64_t s, Mode m)
    : k(stage), complex(std::move(c)), seed(s), mode(m), index(make_index(complex)) {
  movable = movable_vertices(complex);
}

std::vector<Simplex> candidate_simplices(int v, const StageState& state, const QualityParams& params) {
  const int k = state.k;
  const double slack = 2.0 * params.delta_at(k + 1);
  const double lo = params.a - slack;
  const double hi = params.b + slack;
  const HPoint& p = state.index.position(v);

  std::vector<int> near;
  for (int w : state.index.within(p, hi)) {
    if (w == v) continue;
    const double e = hdist(p, state.index.position(w));
    if (e >= lo && e <= hi) near.push_back(w);
  }
  const int m = static_cast<int>(near.size());
  std::vector<char> ok(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double e = hdist(state.index.position(near[i]), state.index.position(near[j]));
      ok[i * m + j] = ok[j * m + i] = (e >= lo && e <= hi) ? 1 : 0;
    }
  }

  std::vector<Simplex> out;
  std::vector<int> pick;
  // Depth-first enumeration of mutually compatible tuples of size 1..k+1.
  auto extend = [&](auto&& self, int from) -> void {
    if (!pick.empty()) {
      Simplex s;
      s.reserve(pick.size());
      for (int i : pick) s.push_back(near[i]);
      out.push_back(std::move(s));
    }
    if (static_cast<int>(pick.size()) == k + 1) return;
    for (int i = from; i < m; ++i) {
      bool fits = true;
      for (int j : pick) {
        if (!ok[j * m + i]) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  extend(extend, 0);
  return out;
}

Placement find_good_position(int v, const std::vector<Simplex>& candidates, double radius, double d,
                             const StageState& state, const QualityParams& params,
                             const PerturbOptions& options) {
  const HPoint& current = state.index.position(v);
  Placement result{current, d, 0, 0};

  // A facet whose own circumradius exceeds c cannot bound a simplex of circumradius <= c.
  std::vector<std::vector<HPoint>> facets;
  facets.reserve(candidates.size());
  for (const auto& cand : candidates) {
    std::vector<HPoint> f;
    f.reserve(cand.size());
    for (int id : cand) f.push_back(state.index.position(id));
    if (f.size() >= 2) {
      try {
        if (circumsphere(f).radius > params.c) continue;
      } catch (const DegeneracyError&) {
        continue;
      }
    }
    facets.push_back(std::move(f));
  }
  if (facets.empty()) return result;

  Rng rng(derive_seed(state.seed, (static_cast<std::uint64_t>(v) << 4) | static_cast<std::uint64_t>(state.k)));
  const Mat frame = boost_from_origin(current);
  std::vector<std::size_t> order(facets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::size_t level_budget = options.mode == Mode::theoretical ? options.max_trials : options.level_trials;
  for (int level = 0;; ++level) {
    for (std::size_t t = 0; t < level_budget; ++t) {
      ++result.trials;
      const HPoint q = sample_in_ball(frame, radius, rng);
      bool clear = true;
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        if (forms_bad_simplex(q, facets[order[pos]], params.a, params.b, params.c, result.d)) {
          // The last blocker is the most likely to block the next trial too.
          std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos),
                      order.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
          clear = false;
          break;
        }
      }
      if (clear) {
        result.position = q;
        return result;
      }
    }
    if (options.mode == Mode::theoretical) {
      throw InfeasibleError("find_good_position: vertex " + std::to_string(v) + " found no position outside the bad " +
                            "regions after " + std::to_string(options.max_trials) + " trials at d = " +
                            std::to_string(d));
    }
    if (level >= options.max_halvings) {
      throw InfeasibleError("find_good_position: vertex " + std::to_string(v) + " exhausted " +
                            std::to_string(options.max_halvings) + " halvings of d");
    }
    result.d *= 0.5;
    ++result.halvings;
  }
}

std::vector<Simplex> audit_interior_faces(const SimplexComplex& complex, int max_dim, double a, double b,
                                          double d) {
  const int n = complex.dim();
  max_dim = std::min(max_dim, n);
  const auto& top = complex.top_cells();
  const auto& interior = complex.interior();
  std::vector<Simplex> faces;
  for (std::size_t c = 0; c < top.size(); ++c) {
    if (!interior[c]) continue;
    for (int k = 2; k <= max_dim; ++k) {
      std::vector<char> mask(n + 1, 0);
      std::fill(mask.begin(), mask.begin() + k + 1, 1);
      do {
        Simplex s;
        for (int i = 0; i <= n; ++i) {
          if (mask[i]) s.push_back(top[c][i]);
        }
        faces.push_back(std::move(s));
      } while (std::prev_permutation(mask.begin(), mask.end()));
    }
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  std::vector<Simplex> bad;
  std::vector<HPoint> verts;
  for (const auto& f : faces) {
    verts.clear();
    for (int id : f) verts.push_back(complex.point(id));
    if (!is_good(verts, a, b, d)) bad.push_back(f);
  }
  return bad;
}

StageReport run_stage(StageState& state, QualityParams& params, const PerturbOptions& options) {
  const int k = state.k;
  const int n = state.complex.dim();
  if (k < 2 || k >= n) throw UsageError("run_stage: stage " + std::to_string(k) + " out of range for n = " + std::to_string(n));
  StageReport report;
  report.k = k;
  const double radius = params.delta_at(k + 1);
  if (state.mode == Mode::theoretical) {
    report.target_d = params.d_at(k + 1);
  } else {
    report.target_d = options.start_factor * params.d_at(k);
  }
  report.achieved_d = report.target_d;
  PerturbOptions opts = options;
  opts.mode = state.mode;

  const std::uint64_t rebuilds_before = state.complex.move_counters().rebuilt_stars;
  state.processed.clear();
  for (std::size_t i = 0; i < state.movable.size(); ++i) {
    if (!state.movable[i]) continue;
    const int v = static_cast<int>(i);
    const auto candidates = candidate_simplices(v, state, params);
    report.max_candidates = std::max(report.max_candidates, candidates.size());
    const Placement place = find_good_position(v, candidates, radius, report.target_d, state, params, opts);
    report.total_trials += place.trials;
    report.max_halvings = std::max(report.max_halvings, place.halvings);
    report.achieved_d = std::min(report.achieved_d, place.d);
    if (!(place.position == state.index.position(v))) {
      const double shift = hdist(state.index.position(v), place.position);
      report.max_displacement = std::max(report.max_displacement, shift);
      state.complex.move_vertex(v, place.position, radius * (1.0 + 1e-9));
      state.index.set_position(v, place.position);
      ++report.moved;
    }
    state.processed.push_back(v);
  }
  report.star_rebuilds = state.complex.move_counters().rebuilt_stars - rebuilds_before;
  params.d[k + 1] = report.achieved_d;
  report.bad_after = audit_interior_faces(state.complex, k + 1, params.a, params.b, report.achieved_d).size();
  state.k = k + 1;
  return report;
}

RefineResult refine(const SimplexComplex& initial, QualityParams params, const PerturbOptions& options) {
  const int n = initial.dim();
  if (params.n != n) throw UsageError("refine: parameters are for a different dimension");
  if (options.mode == Mode::theoretical) {
    const auto schedule = solve_d_schedule(n, params.mu, params);
    for (const auto& [k, v] : schedule) params.d[k] = v;
  }
  RefineResult result;
  result.achieved_d[2] = params.d_at(2);
  StageState state(initial, 2, options.seed, options.mode);
  const std::vector<HPoint> original = initial.point_set().points;
  for (int k = 2; k < n; ++k) {
    StageReport rep = run_stage(state, params, options);
    result.achieved_d[k + 1] = rep.achieved_d;
    result.stages.push_back(rep);
  }
  for (std::size_t i = 0; i < original.size(); ++i) {
    result.max_displacement = std::max(result.max_displacement, hdist(original[i], state.complex.point(static_cast<int>(i))));
  }
  result.complex = std::move(state.complex);
  return result;
}

}  // namespace thicktri
