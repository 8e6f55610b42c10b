#include "thicktri/net.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDarts = 2'000'000;
constexpr int kJitterAttempts = 100;
constexpr double kSeparationSlack = 1e-12;

bool is_origin(const HPoint& p) { return p.spatial().isZero(0.0); }

}  // namespace

void PatchDomain::validate(double epsilon) const {
  if (!(epsilon > 0.0)) throw ValidationError("PatchDomain: epsilon must be positive");
  if (!(margin > 0.0)) throw ValidationError("PatchDomain: margin must be positive");
  if (!(radius > margin)) throw ValidationError("PatchDomain: radius must exceed margin");
  if (margin < 10.0 * epsilon * (1.0 - 1e-12)) {
    throw ValidationError("PatchDomain: margin must be at least 10 epsilon");
  }
}

// ---------------------------------------------------------------------------
// NeighborIndex

NeighborIndex::NeighborIndex(const HPoint& center, double cell_radius, double max_radius)
    : n_(center.dim()),
      identity_frame_(is_origin(center)),
      cell_radius_(cell_radius),
      max_radius_(std::max(0.0, max_radius)) {
  if (!(cell_radius > 0.0)) throw UsageError("NeighborIndex: cell radius must be positive");
  if (!identity_frame_) to_frame_ = boost_to_origin(center);
  box_ = cell_radius_ * std::cosh(max_radius_);
}

Vec NeighborIndex::local_spatial(const HPoint& p) const {
  if (identity_frame_) return p.spatial();
  const Vec moved = to_frame_ * p.coords();
  return moved.tail(n_);
}

std::uint64_t NeighborIndex::key_of(const Vec& s) const {
  const int bits = 64 / n_;
  const std::int64_t half = std::int64_t{1} << (bits - 1);
  std::uint64_t key = 0;
  for (int i = 0; i < n_; ++i) {
    const double c = std::floor(s[i] / box_);
    if (!(std::abs(c) < static_cast<double>(half - 1))) {
      throw UsageError("NeighborIndex: point lies outside the indexed region");
    }
    const auto cell = static_cast<std::uint64_t>(static_cast<std::int64_t>(c) + half);
    key = (key << bits) | cell;
  }
  return key;
}

int NeighborIndex::insert(const HPoint& p) {
  if (p.dim() != n_) throw UsageError("NeighborIndex::insert: dimension mismatch");
  const int id = static_cast<int>(points_.size());
  buckets_[key_of(local_spatial(p))].push_back(id);
  points_.push_back(p);
  bucketed_at_.push_back(p);
  return id;
}

void NeighborIndex::set_position(int id, const HPoint& p) {
  points_.at(id) = p;
  drift_ = std::max(drift_, hdist(bucketed_at_[id], p));
}

template <typename Visit>
void NeighborIndex::visit_candidates(const HPoint& p, double radius, Visit&& visit) const {
  const Vec s = local_spatial(p);
  const double reach = radius + drift_;
  // Spatial coordinates stretch hyperbolic lengths by at most cosh of the distance
  // to the frame origin along the segment.
  const double rho = std::max(max_radius_, std::asinh(s.norm()) + reach);
  const double spatial_reach = reach * std::cosh(rho);
  std::array<std::int64_t, kMaxDim> lo{};
  std::array<std::int64_t, kMaxDim> hi{};
  for (int i = 0; i < n_; ++i) {
    lo[i] = static_cast<std::int64_t>(std::floor((s[i] - spatial_reach) / box_));
    hi[i] = static_cast<std::int64_t>(std::floor((s[i] + spatial_reach) / box_));
  }
  const int bits = 64 / n_;
  const std::int64_t half = std::int64_t{1} << (bits - 1);
  std::array<std::int64_t, kMaxDim> cur = lo;
  for (;;) {
    std::uint64_t key = 0;
    bool valid = true;
    for (int i = 0; i < n_; ++i) {
      if (std::abs(cur[i]) >= half - 1) valid = false;
      key = (key << bits) | static_cast<std::uint64_t>(cur[i] + half);
    }
    if (valid) {
      if (auto it = buckets_.find(key); it != buckets_.end()) {
        for (int id : it->second) visit(id);
      }
    }
    int axis = 0;
    while (axis < n_ && cur[axis] == hi[axis]) {
      cur[axis] = lo[axis];
      ++axis;
    }
    if (axis == n_) break;
    ++cur[axis];
  }
}

std::vector<int> NeighborIndex::within(const HPoint& p, double radius) const {
  std::vector<int> out;
  visit_candidates(p, radius, [&](int id) {
    if (hdist(p, points_[id]) <= radius) out.push_back(id);
  });
  std::sort(out.begin(), out.end());
  return out;
}

double NeighborIndex::nearest_within(const HPoint& p, double radius) const {
  double best = kInf;
  visit_candidates(p, radius, [&](int id) {
    const double d = hdist(p, points_[id]);
    if (d <= radius) best = std::min(best, d);
  });
  return best;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

struct Exclusion {
  HPoint center;  // domain frame
  double radius;
};

class GreedyFiller {
 public:
  GreedyFiller(NeighborIndex& index, const std::vector<Exclusion>& exclusions, int n, double radius,
               double epsilon, double spacing)
      : index_(index),
        exclusions_(exclusions),
        n_(n),
        sinh_radius_(std::sinh(radius)),
        radius_(radius),
        epsilon_(epsilon),
        h_(spacing) {}

  void run() {
    Box box;
    const auto extent = static_cast<std::int64_t>(std::floor(sinh_radius_ / h_));
    for (int i = 0; i < n_; ++i) {
      box.lo[i] = -extent;
      box.hi[i] = extent;
    }
    visit(box);
  }

 private:
  struct Box {
    std::array<std::int64_t, kMaxDim> lo{};
    std::array<std::int64_t, kMaxDim> hi{};
  };

  bool excluded(const HPoint& p, double slack) const {
    for (const auto& e : exclusions_) {
      if (hdist(p, e.center) + slack < e.radius) return true;
    }
    return false;
  }

  void visit(const Box& box) {
    Vec center(n_);
    double half_diag2 = 0.0;
    double min_norm2 = 0.0;
    int widest = 0;
    std::int64_t widest_len = -1;
    for (int i = 0; i < n_; ++i) {
      const double lo = box.lo[i] * h_;
      const double hi = box.hi[i] * h_;
      center[i] = 0.5 * (lo + hi);
      half_diag2 += 0.25 * (hi - lo) * (hi - lo);
      const double gap = lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0);
      min_norm2 += gap * gap;
      if (box.hi[i] - box.lo[i] > widest_len) {
        widest_len = box.hi[i] - box.lo[i];
        widest = i;
      }
    }
    if (min_norm2 > sinh_radius_ * sinh_radius_) return;

    const HPoint c = HPoint::from_spatial(center);
    // Hyperbolic lengths never exceed spatial-coordinate lengths.
    const double rho = std::sqrt(half_diag2);
    if (widest_len == 0) {
      if (hdist(c, HPoint::origin(n_)) > radius_) return;
      if (excluded(c, 0.0)) return;
      if (index_.nearest_within(c, epsilon_) > epsilon_) index_.insert(c);
      return;
    }
    if (rho <= 0.5 * epsilon_) {
      if (index_.nearest_within(c, epsilon_ - rho) + rho <= epsilon_) return;
      if (excluded(c, rho)) return;
    }
    const std::int64_t mid = box.lo[widest] + (box.hi[widest] - box.lo[widest]) / 2;
    Box left = box;
    Box right = box;
    left.hi[widest] = mid;
    right.lo[widest] = mid + 1;
    visit(left);
    visit(right);
  }

  NeighborIndex& index_;
  const std::vector<Exclusion>& exclusions_;
  int n_;
  double sinh_radius_;
  double radius_;
  double epsilon_;
  double h_;
};

}  // namespace

PointSet sample_maximal_net(const PatchDomain& domain, double epsilon, std::uint64_t seed,
                            const NetOptions& options) {
  const int n = domain.dim();
  if (!(epsilon > 0.0)) throw UsageError("sample_maximal_net: epsilon must be positive");
  if (!(domain.radius > 0.0)) throw UsageError("sample_maximal_net: domain radius must be positive");
  if (!(options.probe_fraction > 0.0 && options.probe_fraction <= 0.5)) {
    throw UsageError("sample_maximal_net: probe fraction must lie in (0, 1/2]");
  }

  // Everything below runs in the frame where the domain center is the origin.
  const bool identity = is_origin(domain.center);
  const Mat to_frame = identity ? Mat() : boost_to_origin(domain.center);
  const Mat from_frame = identity ? Mat() : boost_from_origin(domain.center);
  auto to_local = [&](const HPoint& p) { return identity ? p : apply(to_frame, p); };
  auto to_world = [&](const HPoint& p) { return identity ? p : apply(from_frame, p); };

  const HPoint origin = HPoint::origin(n);
  NeighborIndex index(origin, epsilon, domain.radius + epsilon);
  for (const auto& f : options.fixed) {
    if (f.dim() != n) throw UsageError("sample_maximal_net: fixed point has wrong dimension");
    index.insert(to_local(f));
  }
  std::vector<Exclusion> exclusions;
  for (const auto& e : options.exclusions) exclusions.push_back({to_local(e.center), e.radius});
  auto excluded = [&](const HPoint& p) {
    return std::any_of(exclusions.begin(), exclusions.end(),
                       [&](const Exclusion& e) { return hdist(p, e.center) < e.radius; });
  };

  Rng rng(derive_seed(seed, 0x6e6574));
  const double ratio = ball_volume(n, domain.radius) / ball_volume(n, 0.5 * epsilon);
  const auto darts = static_cast<std::size_t>(
      std::min(static_cast<double>(kMaxDarts), std::ceil(options.dart_factor * ratio)));
  const Mat identity_boost = Mat::Identity(n + 1, n + 1);
  for (std::size_t t = 0; t < darts; ++t) {
    const HPoint p = sample_in_ball(identity_boost, domain.radius, rng);
    if (excluded(p)) continue;
    if (index.nearest_within(p, epsilon) >= epsilon) index.insert(p);
  }

  GreedyFiller(index, exclusions, n, domain.radius, epsilon, options.probe_fraction * epsilon).run();

  PointSet ps;
  ps.n = n;
  ps.epsilon = epsilon;
  ps.seed = seed;
  ps.points.reserve(index.size());
  for (std::size_t i = 0; i < options.fixed.size(); ++i) ps.points.push_back(options.fixed[i]);
  for (std::size_t i = options.fixed.size(); i < index.size(); ++i) {
    ps.points.push_back(to_world(index.position(static_cast<int>(i))));
  }
  return ps;
}

PointSet genericity_jitter(const PointSet& ps, double magnitude, std::uint64_t seed) {
  if (!(magnitude >= 0.0)) throw UsageError("genericity_jitter: magnitude must be non-negative");
  if (magnitude == 0.0 || ps.points.empty()) return ps;
  const int n = ps.n;
  const HPoint origin = HPoint::origin(n);
  double reach = 0.0;
  for (const auto& p : ps.points) reach = std::max(reach, hdist(origin, p));
  const double cell = ps.epsilon > 0.0 ? ps.epsilon : 1.0;
  NeighborIndex index(origin, cell, reach + magnitude);
  for (const auto& p : ps.points) index.insert(p);

  PointSet out = ps;
  const double floor_sep = ps.epsilon - kSeparationSlack;
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    const int id = static_cast<int>(i);
    const Mat frame = boost_from_origin(ps.points[i]);
    bool placed = false;
    for (int attempt = 0; attempt < kJitterAttempts && !placed; ++attempt) {
      Rng rng(derive_seed(seed, (static_cast<std::uint64_t>(i) << 8) | static_cast<std::uint64_t>(attempt)));
      const HPoint q = sample_in_ball(frame, magnitude, rng);
      if (hdist(q, ps.points[i]) > magnitude) continue;
      bool ok = true;
      if (ps.epsilon > 0.0) {
        for (int other : index.within(q, ps.epsilon)) {
          if (other != id && hdist(q, index.position(other)) < floor_sep) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        index.set_position(id, q);
        out.points[i] = q;
        placed = true;
      }
    }
    if (!placed) {
      throw InfeasibleError("genericity_jitter: point " + std::to_string(i) + " could not be displaced after " +
                            std::to_string(kJitterAttempts) + " attempts without breaking separation");
    }
  }
  return out;
}

double min_separation(const PointSet& ps) {
  if (ps.points.size() < 2) return kInf;
  const HPoint origin = HPoint::origin(ps.n);
  double reach = 0.0;
  for (const auto& p : ps.points) reach = std::max(reach, hdist(origin, p));
  double radius = ps.epsilon > 0.0 ? 1.5 * ps.epsilon : 0.1;
  for (;;) {
    NeighborIndex index(origin, radius, reach);
    for (const auto& p : ps.points) index.insert(p);
    double best = kInf;
    for (std::size_t i = 0; i < ps.points.size(); ++i) {
      for (int j : index.within(ps.points[i], radius)) {
        if (static_cast<std::size_t>(j) > i) best = std::min(best, hdist(ps.points[i], ps.points[j]));
      }
    }
    if (best < kInf || radius > 2.0 * reach) return best;
    radius *= 2.0;
  }
}

CoverageReport verify_covering(const PointSet& ps, const PatchDomain& domain, double spacing,
                               double probe_radius) {
  if (!(spacing > 0.0)) throw UsageError("verify_covering: spacing must be positive");
  const int n = domain.dim();
  const bool identity = is_origin(domain.center);
  const Mat to_frame = identity ? Mat() : boost_to_origin(domain.center);
  const HPoint origin = HPoint::origin(n);

  const double eps = ps.epsilon > 0.0 ? ps.epsilon : spacing;
  double reach = 0.0;
  std::vector<HPoint> local;
  local.reserve(ps.points.size());
  for (const auto& p : ps.points) {
    local.push_back(identity ? p : apply(to_frame, p));
    reach = std::max(reach, hdist(origin, local.back()));
  }
  NeighborIndex index(origin, eps, std::max(reach, probe_radius));
  for (const auto& p : local) index.insert(p);

  CoverageReport report;
  const auto extent = static_cast<std::int64_t>(std::floor(std::sinh(probe_radius) / spacing));
  std::array<std::int64_t, kMaxDim> cur{};
  for (int i = 0; i < n; ++i) cur[i] = -extent;
  Vec s(n);
  for (;;) {
    for (int i = 0; i < n; ++i) s[i] = static_cast<double>(cur[i]) * spacing;
    const HPoint probe = HPoint::from_spatial(s);
    if (hdist(probe, origin) <= probe_radius) {
      ++report.probes;
      double d = index.nearest_within(probe, eps);
      if (d == kInf) {
        d = index.nearest_within(probe, 4.0 * eps);
        if (d == kInf) d = 4.0 * eps;
      }
      report.worst = std::max(report.worst, d);
      if (d > eps) ++report.uncovered;
    }
    int axis = 0;
    while (axis < n && cur[axis] == extent) {
      cur[axis] = -extent;
      ++axis;
    }
    if (axis == n) break;
    ++cur[axis];
  }
  return report;
}

HPoint barycenter(std::span<const HPoint> points) {
  if (points.empty()) throw UsageError("barycenter: no points");
  Vec sum = points[0].coords();
  for (std::size_t i = 1; i < points.size(); ++i) sum += points[i].coords();
  return HPoint::from_coords(sum);
}

PlantedSliver planted_sliver(const HPoint& center, double epsilon, double tilt) {
  const int n = center.dim();
  if (n < 3) throw UsageError("planted_sliver: needs n >= 3");
  if (!(epsilon > 0.0) || !(tilt >= 0.0)) throw UsageError("planted_sliver: epsilon > 0 and tilt >= 0 required");
  const Mat frame = boost_from_origin(center);
  const double r = 0.72 * epsilon;
  PlantedSliver out;
  for (int i = 0; i < 4; ++i) {
    Vec s = Vec::Zero(n);
    s[0] = i == 0 ? r : (i == 2 ? -r : 0.0);
    s[1] = i == 1 ? r : (i == 3 ? -r : 0.0);
    s[2] = i % 2 == 0 ? tilt : -tilt;
    out.vertices.push_back(apply(frame, HPoint::from_spatial(s)));
  }
  out.exclusion = circumsphere(out.vertices);
  return out;
}

}  // namespace thicktri
