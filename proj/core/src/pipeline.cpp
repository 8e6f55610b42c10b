#include "thicktri/pipeline.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "json.hpp"
#include "thicktri/bounds.hpp"
#include "thicktri/errors.hpp"
#include "thicktri/io.hpp"

namespace thicktri {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kSliverTilt = 1e-7;
constexpr double kJitterFraction = 1e-9;

void log(const RunConfig& config, int level, const std::string& msg) {
  if (config.verbosity >= level) std::cerr << "[thicktri] " << msg << '\n';
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs `fn` with the geometric and numeric failures reported as a failure of `stage`.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InfeasibleError& e) {
    throw StageFailure(name, e.what());
  } catch (const DegeneracyError& e) {
    throw StageFailure(name, e.what());
  } catch (const BoundDomainError& e) {
    throw StageFailure(name, e.what());
  } catch (const std::overflow_error& e) {
    throw StageFailure(name, e.what());
  }
}

QualityParams params_for(int n, double mu) {
  QualityParams p = QualityParams::from_mu(n, mu);
  p.validate();
  return p;
}

void require_dimension(const RunConfig& config, const PointSet& ps, const char* what) {
  if (ps.n != config.n) {
    throw ValidationError(std::string(what) + ": dimension " + std::to_string(ps.n) + " does not match n = " +
                          std::to_string(config.n));
  }
}

}  // namespace

void RunConfig::validate() const {
  if (n < 2 || n > kMaxDim) throw ValidationError("RunConfig: n must lie in [2, " + std::to_string(kMaxDim) + "]");
  params_for(n, mu);
  domain().validate(epsilon());
  if (plant_slivers < 0) throw ValidationError("RunConfig: plant_slivers must be non-negative");
  if (plant_slivers > 0 && n < 3) throw ValidationError("RunConfig: planted slivers need n >= 3");
  if (verbosity < 0) throw ValidationError("RunConfig: verbosity must be non-negative");
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("THICKTRI_OUTPUT_DIR"); env && *env) return env;
  return "thicktri-out";
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  const std::string text = read_text(path);
  check_json(text);
  const json doc = json::parse(text);
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "n") {
        base.n = value.get<int>();
      } else if (key == "mu") {
        base.mu = value.get<double>();
      } else if (key == "patch_radius") {
        base.patch_radius = value.get<double>();
      } else if (key == "margin") {
        base.margin = value.get<double>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "mode") {
        base.mode = parse_mode(value.get<std::string>());
      } else if (key == "output_dir") {
        base.output_dir = value.get<std::string>();
      } else if (key == "verbosity") {
        base.verbosity = value.get<int>();
      } else if (key == "plant_slivers") {
        base.plant_slivers = value.get<int>();
      } else if (key == "input_points") {
        base.input_points = std::filesystem::path(value.get<std::string>());
      } else {
        throw ValidationError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::type_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return base;
}

std::string config_to_json(const RunConfig& c) {
  json doc{{"n", c.n},
           {"mu", c.mu},
           {"patch_radius", c.patch_radius},
           {"margin", c.margin},
           {"seed", c.seed},
           {"mode", to_string(c.mode)},
           {"plant_slivers", c.plant_slivers}};
  if (c.input_points) doc["input_points"] = c.input_points->filename().string();
  return doc.dump(1) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256_hex: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  json d = json::object();
  for (const auto& [k, v] : m.achieved_d) d[std::to_string(k)] = v;
  json doc{{"config_hash", m.config_hash}, {"inputs", m.inputs}, {"outputs", m.outputs},  {"achieved_d", d},
           {"pass", m.pass},               {"vacuous", m.vacuous}, {"exit_code", m.exit_code}};
  return doc.dump(1) + "\n";
}

PointSet sample_points(const RunConfig& config) {
  if (config.input_points) {
    PointSet ps = pointset_from_json(read_text(*config.input_points));
    require_dimension(config, ps, "input points");
    return ps;
  }
  const PatchDomain dom = config.domain();
  NetOptions opts;
  for (int j = 0; j < config.plant_slivers; ++j) {
    // Centers alternate along the first axis: 0, +0.15, -0.15, +0.3, ...
    Vec s = Vec::Zero(config.n);
    s[0] = 0.15 * ((j + 1) / 2) * (j % 2 == 1 ? 1.0 : -1.0);
    if (std::abs(s[0]) + 2.0 * config.epsilon() > dom.inner_radius()) {
      throw ValidationError("RunConfig: too many planted slivers for the shrunk domain");
    }
    const PlantedSliver sliver = planted_sliver(HPoint::from_spatial(s), config.epsilon(), kSliverTilt);
    opts.fixed.insert(opts.fixed.end(), sliver.vertices.begin(), sliver.vertices.end());
    opts.exclusions.push_back(sliver.exclusion);
  }
  PointSet ps = sample_maximal_net(dom, config.epsilon(), config.seed, opts);
  return genericity_jitter(ps, kJitterFraction * config.epsilon(), derive_seed(config.seed, 0x6a));
}

int cmd_sample(const RunConfig& config, const std::filesystem::path& out) {
  config.validate();
  const PointSet ps = stage("sample", [&] { return sample_points(config); });
  log(config, 1, "sampled " + std::to_string(ps.size()) + " points");
  write_text(out, pointset_to_json(ps));
  return kExitPass;
}

int cmd_mesh(const RunConfig& config, const std::filesystem::path& in, const std::filesystem::path& out) {
  config.validate();
  const PointSet ps = pointset_from_json(read_text(in));
  require_dimension(config, ps, "mesh input");
  const SimplexComplex complex = stage("mesh", [&] { return build_delaunay(ps, {config.domain()}); });
  log(config, 1, "triangulated into " + std::to_string(complex.top_cells().size()) + " top cells");
  write_text(out, mesh_to_json(make_mesh_document(complex, {{2, params_for(config.n, config.mu).d_at(2)}}, config.mu)));
  return kExitPass;
}

int cmd_refine(const RunConfig& config, const std::filesystem::path& in, const std::filesystem::path& out) {
  config.validate();
  const MeshDocument doc = mesh_from_json(read_text(in));
  require_dimension(config, doc.points, "refine input");
  const QualityParams params = params_for(config.n, config.mu);
  PerturbOptions opts;
  opts.mode = config.mode;
  opts.seed = config.seed;
  const RefineResult result = stage("refine", [&] { return refine(doc.complex(), params, opts); });
  for (const auto& s : result.stages) {
    log(config, 1, "stage " + std::to_string(s.k) + ": achieved d = " + std::to_string(s.achieved_d) + ", moved " +
                       std::to_string(s.moved));
  }
  write_text(out, mesh_to_json(make_mesh_document(result.complex, result.achieved_d, config.mu)));
  return kExitPass;
}

int cmd_certify(const RunConfig& config, const std::filesystem::path& in, const std::filesystem::path& out,
                const std::optional<std::filesystem::path>& svg) {
  const MeshDocument doc = mesh_from_json(read_text(in));
  const double mu = doc.mu.value_or(config.mu);
  const QualityParams params = params_for(doc.points.n, mu);
  const SimplexComplex complex = doc.complex();
  const CertReport report = certify(complex, params, doc.achieved_d);
  write_text(out, report_to_json(report));
  if (svg) write_text(*svg, mesh_to_svg(complex, &report));
  for (const auto& w : report.warnings) log(config, 0, "warning: " + w);
  log(config, 1, std::to_string(report.good_count) + "/" + std::to_string(report.interior_count) +
                     " interior cells good");
  return report.pass ? kExitPass : kExitCertFail;
}

int cmd_constants(int n, double mu, const std::filesystem::path& out) {
  params_for(n, mu);
  const BoundLedger ledger = stage("constants", [&] { return compute_ledger(n, mu); });
  const std::string text = ledger_to_json(ledger);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return kExitPass;
}

int cmd_pipeline(const RunConfig& config, RunManifest* manifest_out) {
  config.validate();
  const std::filesystem::path dir = config.output_dir.empty() ? default_output_dir() : config.output_dir;
  std::filesystem::create_directories(dir);
  RunManifest m;
  const std::string config_text = config_to_json(config);
  m.config_hash = sha256_hex(config_text);

  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    m.outputs[name] = sha256_hex(text);
  };

  auto t0 = Clock::now();
  if (config.input_points) m.inputs[config.input_points->filename().string()] = sha256_hex(read_text(*config.input_points));
  const PointSet ps = stage("sample", [&] { return sample_points(config); });
  m.timing["sample"] = seconds_since(t0);
  emit("points.json", pointset_to_json(ps));
  log(config, 1, "sampled " + std::to_string(ps.size()) + " points");

  t0 = Clock::now();
  const SimplexComplex mesh = stage("mesh", [&] { return build_delaunay(ps, {config.domain()}); });
  m.timing["mesh"] = seconds_since(t0);
  const QualityParams params = params_for(config.n, config.mu);
  emit("mesh.json", mesh_to_json(make_mesh_document(mesh, {{2, params.d_at(2)}}, config.mu)));
  log(config, 1, "triangulated into " + std::to_string(mesh.top_cells().size()) + " top cells");

  t0 = Clock::now();
  PerturbOptions opts;
  opts.mode = config.mode;
  opts.seed = config.seed;
  const RefineResult refined = stage("refine", [&] { return refine(mesh, params, opts); });
  m.timing["refine"] = seconds_since(t0);
  emit("refined.json", mesh_to_json(make_mesh_document(refined.complex, refined.achieved_d, config.mu)));
  emit("stages.json", stages_to_json(refined.stages));
  m.achieved_d = refined.achieved_d;

  t0 = Clock::now();
  const CertReport report = certify(refined.complex, params, refined.achieved_d);
  m.timing["certify"] = seconds_since(t0);
  emit("report.json", report_to_json(report));
  if (config.n == 2) emit("report.svg", mesh_to_svg(refined.complex, &report));
  for (const auto& w : report.warnings) log(config, 0, "warning: " + w);

  m.pass = report.pass;
  m.vacuous = report.vacuous;
  m.exit_code = report.pass ? kExitPass : kExitCertFail;
  write_text(dir / "manifest.json", manifest_to_json(m));
  write_text(dir / "timing.json", json(m.timing).dump(1) + "\n");
  log(config, 1, std::string("certification ") + (report.pass ? "passed" : "failed"));
  if (manifest_out) *manifest_out = m;
  return m.exit_code;
}

}  // namespace thicktri
