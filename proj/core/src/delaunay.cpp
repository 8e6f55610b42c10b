#include "thicktri/delaunay.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "thicktri/errors.hpp"
#include "thicktri/predicates.hpp"

namespace thicktri {

namespace detail {

namespace {

constexpr int kSlots = kMaxDim + 1;
using Ids = std::array<int, kSlots>;

struct KeyHash {
  std::size_t operator()(const Ids& k) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (int x : k) h = mix_seed(h ^ static_cast<std::uint32_t>(x));
    return static_cast<std::size_t>(h);
  }
};

std::string describe(const Ids& v, int m) {
  std::string s = "[";
  for (int i = 0; i < m; ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

}  // namespace

class Triangulation {
 public:
  Triangulation(int d, int num_points) : d_(d), n_(num_points), x_((num_points + d + 1) * d, 0.0) {
    vcell_.assign(num_points + d + 1, -1);
    // Corner simplex {x_i >= -t, sum (x_i + t) <= L} around the unit ball.
    const double t = 10.0;
    const double len = d * t + t * std::sqrt(static_cast<double>(d)) + t;
    for (int j = 0; j <= d; ++j) {
      double* p = &x_[(n_ + j) * d];
      for (int i = 0; i < d; ++i) p[i] = -t;
      if (j > 0) p[j - 1] += len;
    }
  }

  int dim() const { return d_; }
  int num_points() const { return n_; }
  double* coords(int id) { return &x_[static_cast<std::size_t>(id) * d_]; }
  const double* coords(int id) const { return &x_[static_cast<std::size_t>(id) * d_]; }

  void build(std::span<const int> order) {
    Ids super{};
    for (int j = 0; j <= d_; ++j) super[j] = n_ + j;
    if (orient(super) < 0) std::swap(super[0], super[1]);
    const int c = alloc();
    cells_[c].v = super;
    cells_[c].nb.fill(-1);
    for (int j = 0; j <= d_; ++j) vcell_[n_ + j] = c;
    hint_ = c;
    for (int id : order) insert(id);
  }

  // True when the combinatorics changed.
  bool move(int v, std::span<const double> position) {
    std::vector<double> old(coords(v), coords(v) + d_);
    std::copy(position.begin(), position.end(), coords(v));
    const std::vector<int> star = star_of(v);
    if (star_still_delaunay(star)) return false;
    std::copy(old.begin(), old.end(), coords(v));
    const int inside = remove_and_fill(v, star);
    std::copy(position.begin(), position.end(), coords(v));
    hint_ = inside;
    insert(v);
    return true;
  }

  template <typename F>
  void for_each_visible(F&& f) const {
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (!alive_[c]) continue;
      const Ids& v = cells_[c].v;
      if (std::any_of(v.begin(), v.begin() + d_ + 1, [&](int id) { return id >= n_; })) continue;
      f(v);
    }
  }

 private:
  struct Cell {
    Ids v{};
    Ids nb{};
  };

  int alloc() {
    if (!free_.empty()) {
      const int c = free_.back();
      free_.pop_back();
      alive_[c] = 1;
      return c;
    }
    cells_.emplace_back();
    alive_.push_back(1);
    mark_.push_back(0);
    return static_cast<int>(cells_.size()) - 1;
  }

  void release(int c) {
    alive_[c] = 0;
    free_.push_back(c);
  }

  int orient(const Ids& v) const {
    std::array<const double*, kSlots> p{};
    for (int i = 0; i <= d_; ++i) p[i] = coords(v[i]);
    return predicates::orient(std::span<const double* const>(p.data(), d_ + 1), d_);
  }

  int in_sphere(const Ids& v, int q) const {
    std::array<const double*, kSlots> p{};
    for (int i = 0; i <= d_; ++i) p[i] = coords(v[i]);
    return predicates::in_sphere(std::span<const double* const>(p.data(), d_ + 1),
                                 std::span<const int>(v.data(), d_ + 1), coords(q), q, d_);
  }

  Ids facet_key(const Ids& v, int skip) const {
    Ids k;
    k.fill(INT_MAX);
    int m = 0;
    for (int i = 0; i <= d_; ++i) {
      if (i != skip) k[m++] = v[i];
    }
    std::sort(k.begin(), k.begin() + m);
    return k;
  }

  int slot_of_neighbor(int cell, int neighbor) const {
    for (int i = 0; i <= d_; ++i) {
      if (cells_[cell].nb[i] == neighbor) return i;
    }
    throw DegeneracyError("delaunay: inconsistent adjacency");
  }

  int any_alive() const {
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (alive_[c]) return static_cast<int>(c);
    }
    throw DegeneracyError("delaunay: empty triangulation");
  }

  int locate(int q, int start) {
    int c = (start >= 0 && start < static_cast<int>(cells_.size()) && alive_[start]) ? start : any_alive();
    for (std::uint64_t steps = 0;; ++steps) {
      if (steps > 50'000'000) throw DegeneracyError("delaunay: point location did not terminate");
      const int off = static_cast<int>(walk_counter_++ % static_cast<std::uint64_t>(d_ + 1));
      int next = -1;
      for (int k = 0; k <= d_; ++k) {
        const int i = (k + off) % (d_ + 1);
        Ids v = cells_[c].v;
        v[i] = q;
        if (orient(v) < 0) {
          next = cells_[c].nb[i];
          if (next < 0) throw UsageError("delaunay: point lies outside the model ball");
          break;
        }
      }
      if (next < 0) return c;
      c = next;
    }
  }

  void insert(int q) {
    const int start = locate(q, hint_);
    if (in_sphere(cells_[start].v, q) <= 0) {
      throw DegeneracyError("delaunay: vertex " + std::to_string(q) + " duplicates a vertex of cell " +
                            describe(cells_[start].v, d_ + 1));
    }
    stamp_ += 2;
    const std::uint32_t in = stamp_;
    const std::uint32_t out = stamp_ + 1;
    std::vector<int> conflict{start};
    mark_[start] = in;
    for (std::size_t head = 0; head < conflict.size(); ++head) {
      const int c = conflict[head];
      for (int i = 0; i <= d_; ++i) {
        const int nb = cells_[c].nb[i];
        if (nb < 0 || mark_[nb] == in || mark_[nb] == out) continue;
        if (in_sphere(cells_[nb].v, q) > 0) {
          mark_[nb] = in;
          conflict.push_back(nb);
        } else {
          mark_[nb] = out;
        }
      }
    }

    std::vector<int> created;
    for (const int c : conflict) {
      for (int i = 0; i <= d_; ++i) {
        const int nb = cells_[c].nb[i];
        if (nb >= 0 && mark_[nb] == in) continue;
        Ids v = cells_[c].v;
        v[i] = q;
        const int nc = alloc();
        cells_[nc].v = v;
        cells_[nc].nb.fill(-1);
        cells_[nc].nb[i] = nb;
        mark_[nc] = 0;
        if (nb >= 0) cells_[nb].nb[slot_of_neighbor(nb, c)] = nc;
        created.push_back(nc);
      }
    }
    for (const int c : conflict) release(c);
    link_among(created, q);
    for (const int c : created) {
      for (int i = 0; i <= d_; ++i) vcell_[cells_[c].v[i]] = c;
    }
    hint_ = created.back();
  }

  // Pairs the facets through q of freshly created cells.
  void link_among(const std::vector<int>& created, int q) {
    struct Entry {
      Ids key;
      int cell;
      int slot;
    };
    std::vector<Entry> entries;
    entries.reserve(created.size() * d_);
    for (const int c : created) {
      for (int j = 0; j <= d_; ++j) {
        if (cells_[c].v[j] == q) continue;
        entries.push_back({facet_key(cells_[c].v, j), c, j});
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
    for (std::size_t i = 0; i + 1 < entries.size(); i += 2) {
      if (entries[i].key != entries[i + 1].key) {
        throw DegeneracyError("delaunay: cavity is not star-shaped around vertex " + std::to_string(q));
      }
      cells_[entries[i].cell].nb[entries[i].slot] = entries[i + 1].cell;
      cells_[entries[i + 1].cell].nb[entries[i + 1].slot] = entries[i].cell;
    }
    if (entries.size() % 2 != 0) throw DegeneracyError("delaunay: unmatched cavity facet");
  }

  std::vector<int> star_of(int v) {
    const int start = vcell_[v];
    if (start < 0 || !alive_[start]) throw DegeneracyError("delaunay: stale vertex-to-cell map");
    stamp_ += 2;
    std::vector<int> star{start};
    mark_[start] = stamp_;
    for (std::size_t head = 0; head < star.size(); ++head) {
      const int c = star[head];
      for (int i = 0; i <= d_; ++i) {
        if (cells_[c].v[i] == v) continue;
        const int nb = cells_[c].nb[i];
        if (nb < 0 || mark_[nb] == stamp_) continue;
        mark_[nb] = stamp_;
        star.push_back(nb);
      }
    }
    return star;
  }

  bool star_still_delaunay(const std::vector<int>& star) const {
    for (const int c : star) {
      if (orient(cells_[c].v) <= 0) return false;
    }
    for (const int c : star) {
      for (int i = 0; i <= d_; ++i) {
        const int nb = cells_[c].nb[i];
        if (nb < 0) continue;
        const int opposite = cells_[nb].v[slot_of_neighbor(nb, c)];
        if (in_sphere(cells_[c].v, opposite) > 0) return false;
      }
    }
    return true;
  }

  // Deletes the star of v and fills the hole with the Delaunay cells of its link by
  // gift wrapping from the hole boundary. Returns one of the new cells.
  int remove_and_fill(int v, const std::vector<int>& star) {
    struct Side {
      int cell;
      int slot;
    };
    struct Pending {
      Ids tmpl;
      int free;
    };
    std::unordered_map<Ids, Side, KeyHash> open;
    std::vector<Pending> queue;
    std::vector<int> link;
    for (const int c : star) {
      for (int i = 0; i <= d_; ++i) {
        if (cells_[c].v[i] != v) {
          link.push_back(cells_[c].v[i]);
          continue;
        }
        // A facet on the super-simplex boundary has no outer cell.
        const int outer = cells_[c].nb[i];
        open.emplace(facet_key(cells_[c].v, i), Side{outer, outer < 0 ? -1 : slot_of_neighbor(outer, c)});
        queue.push_back({cells_[c].v, i});
      }
    }
    std::sort(link.begin(), link.end());
    link.erase(std::unique(link.begin(), link.end()), link.end());
    for (const int c : star) release(c);

    std::vector<int> created;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Pending item = queue[head];
      const Ids key = facet_key(item.tmpl, item.free);
      const auto it = open.find(key);
      if (it == open.end()) continue;

      int best = -1;
      Ids cell{};
      for (const int w : link) {
        if (std::find(key.begin(), key.begin() + d_, w) != key.begin() + d_) continue;
        Ids trial = item.tmpl;
        trial[item.free] = w;
        if (orient(trial) <= 0) continue;
        if (best < 0 || in_sphere(cell, w) > 0) {
          best = w;
          cell = trial;
        }
      }
      if (best < 0) {
        throw DegeneracyError("delaunay: no link vertex beyond facet " + describe(key, d_) +
                              " while removing vertex " + std::to_string(v));
      }

      const int nc = alloc();
      cells_[nc].v = cell;
      cells_[nc].nb.fill(-1);
      mark_[nc] = 0;
      created.push_back(nc);
      for (int j = 0; j <= d_; ++j) {
        const Ids fk = facet_key(cell, j);
        const auto match = open.find(fk);
        if (match != open.end()) {
          const Side other = match->second;
          cells_[nc].nb[j] = other.cell;
          if (other.cell >= 0) cells_[other.cell].nb[other.slot] = nc;
          open.erase(match);
          continue;
        }
        open.emplace(fk, Side{nc, j});
        Ids tmpl = cell;
        std::swap(tmpl[(j + 1) % (d_ + 1)], tmpl[(j + 2) % (d_ + 1)]);
        queue.push_back({tmpl, j});
      }
    }
    if (!open.empty()) throw DegeneracyError("delaunay: hole left open after removing vertex " + std::to_string(v));
    for (const int c : created) {
      for (int i = 0; i <= d_; ++i) vcell_[cells_[c].v[i]] = c;
    }
    return created.front();
  }

  int d_;
  int n_;
  std::vector<double> x_;
  std::vector<Cell> cells_;
  std::vector<char> alive_;
  std::vector<std::uint32_t> mark_;
  std::vector<int> free_;
  std::vector<int> vcell_;
  std::uint32_t stamp_ = 0;
  int hint_ = 0;
  std::uint64_t walk_counter_ = 0;
};

}  // namespace detail

namespace {

Vec model_coords(const HPoint& p, const std::optional<Mat>& to_frame) {
  return to_poincare(to_frame ? apply(*to_frame, p) : p);
}

std::optional<Mat> frame_of(const std::optional<PatchDomain>& domain) {
  if (!domain || domain->center.spatial().isZero(0.0)) return std::nullopt;
  return boost_to_origin(domain->center);
}

// Insertion order: Morton order of quantized model coordinates.
std::vector<int> spatial_order(const detail::Triangulation& tri) {
  const int d = tri.dim();
  const int n = tri.num_points();
  const int bits = std::min(21, 63 / d);
  const double scale = static_cast<double>((1u << bits) - 1);
  std::vector<std::pair<std::uint64_t, int>> keyed(n);
  for (int id = 0; id < n; ++id) {
    const double* x = tri.coords(id);
    std::uint64_t key = 0;
    std::array<std::uint32_t, kMaxDim> q{};
    for (int i = 0; i < d; ++i) {
      q[i] = static_cast<std::uint32_t>(std::clamp(0.5 * (x[i] + 1.0), 0.0, 1.0) * scale);
    }
    for (int b = bits - 1; b >= 0; --b) {
      for (int i = 0; i < d; ++i) key = (key << 1) | ((q[i] >> b) & 1u);
    }
    keyed[id] = {key, id};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = keyed[i].second;
  return order;
}

}  // namespace

// ---------------------------------------------------------------------------
// SimplexComplex

struct SimplexComplex::Snapshot {
  std::vector<std::vector<Simplex>> faces;  // faces[k], k = 0..n (k = 0 unused)
  std::vector<char> interior;
  std::vector<std::vector<int>> vertex_star;
};

SimplexComplex::SimplexComplex() = default;
SimplexComplex::~SimplexComplex() = default;

SimplexComplex::SimplexComplex(const SimplexComplex& other)
    : points_(other.points_),
      domain_(other.domain_),
      tri_(other.tri_ ? std::make_unique<detail::Triangulation>(*other.tri_) : nullptr),
      given_cells_(other.given_cells_),
      counters_(other.counters_) {
  std::lock_guard<std::mutex> lock(other.cache_mutex_);
  snapshot_ = other.snapshot_;
}

SimplexComplex& SimplexComplex::operator=(const SimplexComplex& other) {
  if (this == &other) return *this;
  SimplexComplex copy(other);
  *this = std::move(copy);
  return *this;
}

SimplexComplex::SimplexComplex(SimplexComplex&& other) noexcept
    : points_(std::move(other.points_)),
      domain_(std::move(other.domain_)),
      tri_(std::move(other.tri_)),
      given_cells_(std::move(other.given_cells_)),
      counters_(other.counters_),
      snapshot_(std::move(other.snapshot_)) {}

SimplexComplex& SimplexComplex::operator=(SimplexComplex&& other) noexcept {
  points_ = std::move(other.points_);
  domain_ = std::move(other.domain_);
  tri_ = std::move(other.tri_);
  given_cells_ = std::move(other.given_cells_);
  counters_ = other.counters_;
  snapshot_ = std::move(other.snapshot_);
  return *this;
}

SimplexComplex SimplexComplex::from_cells(PointSet ps, std::vector<Simplex> top_cells,
                                          std::optional<PatchDomain> domain) {
  const int n = ps.n;
  for (auto& c : top_cells) {
    if (static_cast<int>(c.size()) != n + 1) throw ValidationError("complex: top cell does not have n+1 vertices");
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) throw ValidationError("complex: repeated vertex in cell");
    for (int id : c) {
      if (id < 0 || static_cast<std::size_t>(id) >= ps.points.size()) {
        throw ValidationError("complex: cell references a missing vertex");
      }
    }
  }
  std::sort(top_cells.begin(), top_cells.end());
  SimplexComplex sc;
  sc.points_ = std::move(ps);
  sc.domain_ = std::move(domain);
  sc.given_cells_ = std::move(top_cells);
  return sc;
}

void SimplexComplex::invalidate() {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  snapshot_.reset();
}

const SimplexComplex::Snapshot& SimplexComplex::snapshot() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (snapshot_) return *snapshot_;
  auto snap = std::make_shared<Snapshot>();
  const int n = dim();
  snap->faces.assign(n + 1, {});
  std::vector<Simplex>& top = snap->faces[n];
  if (tri_) {
    tri_->for_each_visible([&](const auto& v) {
      Simplex s(v.begin(), v.begin() + n + 1);
      std::sort(s.begin(), s.end());
      top.push_back(std::move(s));
    });
    std::sort(top.begin(), top.end());
  } else {
    top = given_cells_;
  }
  for (int k = 1; k < n; ++k) {
    std::vector<Simplex>& out = snap->faces[k];
    std::vector<int> pick(k + 1);
    for (const auto& cell : top) {
      // All (k+1)-subsets of the n+1 vertices.
      std::vector<char> mask(n + 1, 0);
      std::fill(mask.begin(), mask.begin() + k + 1, 1);
      do {
        int m = 0;
        for (int i = 0; i <= n; ++i) {
          if (mask[i]) pick[m++] = cell[i];
        }
        out.push_back(pick);
      } while (std::prev_permutation(mask.begin(), mask.end()));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  snap->interior.resize(top.size());
  snap->vertex_star.assign(points_.points.size(), {});
  std::vector<HPoint> verts(n + 1);
  for (std::size_t c = 0; c < top.size(); ++c) {
    for (int i = 0; i <= n; ++i) {
      verts[i] = points_.points[top[c][i]];
      snap->vertex_star[top[c][i]].push_back(static_cast<int>(c));
    }
    snap->interior[c] = circumball_interior(verts, domain_) ? 1 : 0;
  }
  snapshot_ = std::move(snap);
  return *snapshot_;
}

const std::vector<Simplex>& SimplexComplex::cells(int k) const {
  if (k < 1 || k > dim()) throw UsageError("SimplexComplex::cells: dimension out of range");
  return snapshot().faces[k];
}

const std::vector<char>& SimplexComplex::interior() const { return snapshot().interior; }

const std::vector<int>& SimplexComplex::star(int v) const { return snapshot().vertex_star.at(v); }

std::vector<int> SimplexComplex::cofaces(const Simplex& face) const {
  if (face.empty()) return {};
  const auto& snap = snapshot();
  const auto& top = snap.faces[dim()];
  std::vector<int> out;
  for (int c : snap.vertex_star.at(face[0])) {
    if (std::includes(top[c].begin(), top[c].end(), face.begin(), face.end())) out.push_back(c);
  }
  return out;
}

bool SimplexComplex::move_vertex(int v, const HPoint& position, double max_displacement) {
  if (v < 0 || static_cast<std::size_t>(v) >= points_.points.size()) {
    throw UsageError("move_vertex: vertex id out of range");
  }
  if (position.dim() != dim()) throw UsageError("move_vertex: dimension mismatch");
  const double shift = hdist(points_.points[v], position);
  if (shift > max_displacement) {
    throw UsageError("move_vertex: displacement " + std::to_string(shift) + " exceeds the bound " +
                     std::to_string(max_displacement));
  }
  ++counters_.moves;
  if (!tri_) {
    points_.points[v] = position;
    *this = build_delaunay(points_, DelaunayOptions{domain_});
    return true;
  }
  if (position == points_.points[v]) return false;
  points_.points[v] = position;
  const Vec x = model_coords(position, frame_of(domain_));
  const bool changed = tri_->move(v, std::span<const double>(x.data(), x.size()));
  if (changed) ++counters_.rebuilt_stars;
  // Interior flags depend on positions even when the cells are unchanged.
  invalidate();
  return changed;
}

SimplexComplex build_delaunay(const PointSet& ps, const DelaunayOptions& options) {
  const int n = ps.n;
  if (n < 2 || n > kMaxDim) throw UsageError("build_delaunay: unsupported dimension " + std::to_string(n));
  const int count = static_cast<int>(ps.points.size());
  auto tri = std::make_unique<detail::Triangulation>(n, count);
  const auto frame = frame_of(options.domain);
  for (int id = 0; id < count; ++id) {
    if (ps.points[id].dim() != n) throw UsageError("build_delaunay: point dimension mismatch");
    const Vec x = model_coords(ps.points[id], frame);
    std::copy(x.data(), x.data() + n, tri->coords(id));
  }
  tri->build(spatial_order(*tri));
  SimplexComplex sc;
  sc.points_ = ps;
  sc.domain_ = options.domain;
  sc.tri_ = std::move(tri);
  return sc;
}

SimplexComplex move_vertex(const SimplexComplex& complex, int vertex_id, const HPoint& position,
                           double max_displacement) {
  SimplexComplex out(complex);
  out.move_vertex(vertex_id, position, max_displacement);
  return out;
}

bool circumball_interior(std::span<const HPoint> cell, const std::optional<PatchDomain>& domain) {
  try {
    const Sphere s = circumsphere(cell);
    if (!domain) return true;
    return hdist(s.center, domain->center) + s.radius <= domain->inner_radius();
  } catch (const DegeneracyError&) {
    return false;
  }
}

std::vector<Simplex> non_delaunay_cells(const SimplexComplex& complex, const PointSet& ps, double tol) {
  std::vector<Simplex> bad;
  const auto& top = complex.top_cells();
  const auto& interior = complex.interior();
  if (top.empty()) return bad;
  const int n = complex.dim();
  const HPoint origin = HPoint::origin(n);
  double reach = 0.0;
  double cell_radius = 0.0;
  std::vector<Sphere> spheres(top.size());
  std::vector<HPoint> verts(n + 1);
  for (std::size_t c = 0; c < top.size(); ++c) {
    if (!interior[c]) continue;
    for (int i = 0; i <= n; ++i) verts[i] = ps.points.at(top[c][i]);
    spheres[c] = circumsphere(verts);
    cell_radius = std::max(cell_radius, spheres[c].radius);
  }
  for (const auto& p : ps.points) reach = std::max(reach, hdist(origin, p));
  if (!(cell_radius > 0.0)) return bad;
  NeighborIndex index(origin, cell_radius, reach);
  for (const auto& p : ps.points) index.insert(p);
  for (std::size_t c = 0; c < top.size(); ++c) {
    if (!interior[c]) continue;
    const Sphere& s = spheres[c];
    for (int id : index.within(s.center, s.radius - tol)) {
      if (std::binary_search(top[c].begin(), top[c].end(), id)) continue;
      if (hdist(s.center, ps.points[id]) < s.radius - tol) {
        bad.push_back(top[c]);
        break;
      }
    }
  }
  return bad;
}

bool is_delaunay(const SimplexComplex& complex, const PointSet& ps, double tol) {
  return non_delaunay_cells(complex, ps, tol).empty();
}

}  // namespace thicktri
