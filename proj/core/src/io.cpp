#include "thicktri/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

using nlohmann::json;

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + e.what(),
                     line, column);
  }
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object()) throw ValidationError("schema: expected an object holding '" + std::string(key) + "'");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("schema: missing field '" + std::string(key) + "'");
  return *it;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError("schema: '" + what + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ValidationError("schema: '" + what + "' must be an integer");
  return j.get<int>();
}

json point_json(const HPoint& p) {
  json row = json::array();
  for (Eigen::Index i = 0; i < p.coords().size(); ++i) row.push_back(p.coords()[i]);
  return row;
}

HPoint point_from_json(const json& row, int n, std::size_t index) {
  const std::string where = "points[" + std::to_string(index) + "]";
  if (!row.is_array() || static_cast<int>(row.size()) != n + 1) {
    throw ValidationError("schema: " + where + " must hold n + 1 = " + std::to_string(n + 1) + " coordinates");
  }
  Vec x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = number(row[i], where);
  if (!x.allFinite()) throw ValidationError("finite coordinates: " + where);
  const double q = minkowski_dot(x, x);
  if (!(x[0] > 0.0) || std::abs(q + 1.0) > kLoadTolerance * x[0] * x[0]) {
    throw ValidationError("hyperboloid constraint <x,x> = -1, x0 > 0 violated by " + where);
  }
  return HPoint::from_coords_verbatim(x);
}

json domain_json(const PatchDomain& dom) {
  return json{{"center", point_json(dom.center)}, {"radius", dom.radius}, {"margin", dom.margin}};
}

json dmap_json(const std::map<int, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

std::map<int, double> dmap_from_json(const json& j, const std::string& what) {
  if (!j.is_object()) throw ValidationError("schema: '" + what + "' must be an object");
  std::map<int, double> out;
  for (const auto& [key, value] : j.items()) {
    int k = 0;
    try {
      k = std::stoi(key);
    } catch (const std::exception&) {
      throw ValidationError("schema: '" + what + "' has non-integer key '" + key + "'");
    }
    out[k] = number(value, what + "." + key);
  }
  return out;
}

json simplices_json(const std::vector<Simplex>& cells) {
  json out = json::array();
  for (const auto& s : cells) out.push_back(s);
  return out;
}

json histogram_json(const Histogram& h) { return json{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}}; }

PointSet pointset_from(const json& doc) {
  PointSet ps;
  ps.n = integer(field(doc, "n"), "n");
  if (ps.n < 1 || ps.n > kMaxDim) throw ValidationError("dimension 1 <= n <= " + std::to_string(kMaxDim));
  ps.epsilon = number(field(doc, "epsilon"), "epsilon");
  if (!(ps.epsilon >= 0.0)) throw ValidationError("epsilon >= 0");
  const json& seed = field(doc, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw ValidationError("schema: 'seed' must be an integer");
  ps.seed = seed.get<std::uint64_t>();
  const json& pts = field(doc, "points");
  if (!pts.is_array()) throw ValidationError("schema: 'points' must be an array");
  ps.points.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) ps.points.push_back(point_from_json(pts[i], ps.n, i));
  return ps;
}

json pointset_fields(const PointSet& ps) {
  json pts = json::array();
  for (const auto& p : ps.points) pts.push_back(point_json(p));
  return json{{"n", ps.n}, {"epsilon", ps.epsilon}, {"seed", ps.seed}, {"points", std::move(pts)}};
}

}  // namespace

SimplexComplex MeshDocument::complex() const { return SimplexComplex::from_cells(points, cells.at(points.n), domain); }

MeshDocument make_mesh_document(const SimplexComplex& complex, const std::map<int, double>& achieved_d,
                                std::optional<double> mu) {
  MeshDocument doc;
  doc.points = complex.point_set();
  doc.cells.resize(complex.dim() + 1);
  for (int k = 1; k <= complex.dim(); ++k) doc.cells[k] = complex.cells(k);
  doc.interior = complex.interior();
  doc.domain = complex.domain();
  doc.achieved_d = achieved_d;
  doc.mu = mu;
  return doc;
}

std::string pointset_to_json(const PointSet& ps) { return pointset_fields(ps).dump(1) + "\n"; }

PointSet pointset_from_json(const std::string& text) { return pointset_from(parse_document(text)); }

std::string mesh_to_json(const MeshDocument& mesh) {
  json doc = pointset_fields(mesh.points);
  json cells = json::object();
  for (int k = 1; k < static_cast<int>(mesh.cells.size()); ++k) cells[std::to_string(k)] = simplices_json(mesh.cells[k]);
  doc["cells"] = std::move(cells);
  json interior = json::array();
  for (char c : mesh.interior) interior.push_back(c != 0);
  doc["interior"] = std::move(interior);
  if (mesh.domain) doc["domain"] = domain_json(*mesh.domain);
  if (!mesh.achieved_d.empty()) doc["achieved_d"] = dmap_json(mesh.achieved_d);
  if (mesh.mu) doc["mu"] = *mesh.mu;
  return doc.dump(1) + "\n";
}

MeshDocument mesh_from_json(const std::string& text) {
  const json doc = parse_document(text);
  MeshDocument mesh;
  mesh.points = pointset_from(doc);
  const int n = mesh.points.n;
  const int nv = static_cast<int>(mesh.points.size());
  const json& cells = field(doc, "cells");
  mesh.cells.resize(n + 1);
  for (int k = 1; k <= n; ++k) {
    const std::string key = std::to_string(k);
    const json& list = field(cells, key.c_str());
    if (!list.is_array()) throw ValidationError("schema: 'cells." + key + "' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "cells." + key + "[" + std::to_string(i) + "]";
      const json& row = list[i];
      if (!row.is_array() || static_cast<int>(row.size()) != k + 1) {
        throw ValidationError("simplex size: " + where + " must list " + std::to_string(k + 1) + " vertices");
      }
      Simplex s;
      for (const auto& id : row) s.push_back(integer(id, where));
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[j] < 0 || s[j] >= nv) throw ValidationError("vertex ids in range: " + where);
        if (j > 0 && s[j - 1] >= s[j]) throw ValidationError("sorted distinct vertex ids: " + where);
      }
      mesh.cells[k].push_back(std::move(s));
    }
  }
  const json& interior = field(doc, "interior");
  if (!interior.is_array() || interior.size() != mesh.cells[n].size()) {
    throw ValidationError("one interior flag per top cell");
  }
  for (const auto& flag : interior) {
    if (!flag.is_boolean()) throw ValidationError("schema: interior flags must be booleans");
    mesh.interior.push_back(flag.get<bool>() ? 1 : 0);
  }
  if (auto it = doc.find("domain"); it != doc.end()) {
    PatchDomain dom;
    dom.center = point_from_json(field(*it, "center"), n, 0);
    dom.radius = number(field(*it, "radius"), "domain.radius");
    dom.margin = number(field(*it, "margin"), "domain.margin");
    if (!(dom.radius > dom.margin && dom.margin > 0.0)) throw ValidationError("domain radius > margin > 0");
    mesh.domain = dom;
  }
  if (auto it = doc.find("achieved_d"); it != doc.end()) mesh.achieved_d = dmap_from_json(*it, "achieved_d");
  if (auto it = doc.find("mu"); it != doc.end()) mesh.mu = number(*it, "mu");
  return mesh;
}

std::string report_to_json(const CertReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back(json{{"vertices", c.vertices},
                         {"edges", c.edges},
                         {"circumradius", c.circumradius},
                         {"min_altitude", c.min_altitude},
                         {"min_dihedral", c.min_dihedral},
                         {"max_dihedral", c.max_dihedral},
                         {"bilipschitz", c.bilipschitz},
                         {"good", c.good}});
  }
  json doc{{"n", r.n},
           {"a", r.a},
           {"b", r.b},
           {"d", r.d},
           {"achieved_d", dmap_json(r.achieved_d)},
           {"pass", r.pass},
           {"vacuous", r.vacuous},
           {"interior_count", r.interior_count},
           {"good_count", r.good_count},
           {"failing", simplices_json(r.failing)},
           {"L_estimate", r.L_estimate},
           {"grid_depth", r.grid_depth},
           {"altitude_histogram", histogram_json(r.altitude_histogram)},
           {"dihedral_histogram", histogram_json(r.dihedral_histogram)},
           {"warnings", r.warnings},
           {"cells", std::move(cells)}};
  return doc.dump(1) + "\n";
}

std::string ledger_to_json(const BoundLedger& l) {
  json counts = json::object();
  for (const auto& [k, v] : l.N) counts[std::to_string(k)] = v;
  json params{{"epsilon", l.params.epsilon}, {"delta", l.params.delta}, {"a", l.params.a},
              {"b", l.params.b},             {"c", l.params.c},         {"delta_k", dmap_json(l.params.delta_k)}};
  json doc{{"n", l.n},
           {"mu", l.mu},
           {"params", std::move(params)},
           {"alpha0", l.alpha0},
           {"h1", l.h1},
           {"h0", l.h0},
           {"m", l.m},
           {"N", std::move(counts)},
           {"d", dmap_json(l.d)},
           {"D", dmap_json(l.D)},
           {"R", dmap_json(l.R)},
           {"V", dmap_json(l.V)},
           {"budget", dmap_json(l.budget)}};
  return doc.dump(1) + "\n";
}

std::string stages_to_json(const std::vector<StageReport>& stages) {
  json out = json::array();
  for (const auto& s : stages) {
    out.push_back(json{{"k", s.k},
                       {"target_d", s.target_d},
                       {"achieved_d", s.achieved_d},
                       {"moved", s.moved},
                       {"max_candidates", s.max_candidates},
                       {"total_trials", s.total_trials},
                       {"star_rebuilds", s.star_rebuilds},
                       {"max_halvings", s.max_halvings},
                       {"max_displacement", s.max_displacement},
                       {"bad_after", s.bad_after}});
  }
  return out.dump(1) + "\n";
}

std::string mesh_to_off(const SimplexComplex& complex) {
  const int n = complex.dim();
  const auto& faces = complex.cells(std::min(n, 2));
  std::ostringstream os;
  os.precision(17);
  os << "OFF\n" << complex.num_vertices() << ' ' << faces.size() << " 0\n";
  for (std::size_t i = 0; i < complex.num_vertices(); ++i) {
    const Vec x = to_poincare(complex.point(static_cast<int>(i)));
    for (int j = 0; j < 3; ++j) os << (j ? " " : "") << (j < x.size() ? x[j] : 0.0);
    os << '\n';
  }
  for (const auto& f : faces) {
    os << f.size();
    for (int id : f) os << ' ' << id;
    os << '\n';
  }
  return os.str();
}

namespace {

constexpr double kSvgScale = 400.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Screen coordinates: y grows downward.
std::string svg_xy(const Vec& z) { return fmt(kSvgScale * (1.0 + z[0])) + "," + fmt(kSvgScale * (1.0 - z[1])); }

// Path segment from the current point z1 to z2 along the geodesic of the disk.
std::string arc_to(const Vec& z1, const Vec& z2) {
  // The geodesic lies on a circle orthogonal to the unit circle: 2 c.z = |z|^2 + 1.
  const double det = 2.0 * (z1[0] * z2[1] - z1[1] * z2[0]);
  if (std::abs(det) < 1e-12) return " L " + svg_xy(z2);
  const double r1 = z1.squaredNorm() + 1.0;
  const double r2 = z2.squaredNorm() + 1.0;
  const double cx = (r1 * z2[1] - r2 * z1[1]) / det;
  const double cy = (z1[0] * r2 - z2[0] * r1) / det;
  const double radius = std::sqrt(std::max(0.0, cx * cx + cy * cy - 1.0));
  const double cross = (z1[0] - cx) * (z2[1] - cy) - (z1[1] - cy) * (z2[0] - cx);
  // Counterclockwise in model coordinates is the negative sweep once y is flipped.
  const int sweep = cross > 0.0 ? 0 : 1;
  return " A " + fmt(kSvgScale * radius) + "," + fmt(kSvgScale * radius) + " 0 0 " + std::to_string(sweep) + " " +
         svg_xy(z2);
}

}  // namespace

std::string mesh_to_svg(const SimplexComplex& complex, const CertReport* report) {
  if (complex.dim() != 2) throw UsageError("mesh_to_svg: only H^2 complexes can be drawn");
  const auto& top = complex.top_cells();
  const auto& interior = complex.interior();
  std::vector<Vec> z(complex.num_vertices());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = to_poincare(complex.point(static_cast<int>(i)));

  std::map<Simplex, double> altitude_of;
  double alt_max = 0.0;
  if (report) {
    for (const auto& rec : report->cells) {
      altitude_of[rec.vertices] = rec.min_altitude;
      alt_max = std::max(alt_max, rec.min_altitude);
    }
  }

  std::ostringstream os;
  const std::string size = fmt(2.0 * kSvgScale);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<circle cx=\"" << fmt(kSvgScale) << "\" cy=\"" << fmt(kSvgScale) << "\" r=\"" << fmt(kSvgScale)
     << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (std::size_t c = 0; c < top.size(); ++c) {
    const auto& s = top[c];
    std::string fill = "none";
    if (interior[c]) {
      double t = 0.5;
      if (auto it = altitude_of.find(s); it != altitude_of.end() && alt_max > 0.0) t = it->second / alt_max;
      const int level = static_cast<int>(std::lround(80.0 + 160.0 * std::clamp(t, 0.0, 1.0)));
      fill = "rgb(" + std::to_string(level) + "," + std::to_string(level) + "," + std::to_string(level) + ")";
    }
    os << "<path d=\"M " << svg_xy(z[s[0]]) << arc_to(z[s[0]], z[s[1]]) << arc_to(z[s[1]], z[s[2]])
       << arc_to(z[s[2]], z[s[0]]) << " Z\" fill=\"" << fill << "\" stroke=\"black\" stroke-width=\"0.3\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void check_json(const std::string& text) { parse_document(text); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw UsageError("failed writing '" + path.string() + "'");
}

}  // namespace thicktri
