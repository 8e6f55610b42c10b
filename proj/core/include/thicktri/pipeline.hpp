#pragma once

// Batch entry points: sample -> mesh -> refine -> certify, plus the constants ledger.
// Every command reads and writes the documents of io.hpp.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thicktri/certify.hpp"
#include "thicktri/perturb.hpp"

namespace thicktri {

/// Exit statuses of the commands.
enum ExitCode : int { kExitPass = 0, kExitCertFail = 1, kExitUsage = 2, kExitStageFailure = 3 };

/// A pipeline stage failed; `stage()` names it.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunConfig {
  int n = 3;
  double mu = 5.0;
  double patch_radius = 1.0;
  double margin = 0.5;
  std::uint64_t seed = 1;
  Mode mode = Mode::adaptive;
  std::filesystem::path output_dir;
  int verbosity = 0;
  /// Flat tetrahedra placed in the net before sampling (n >= 3).
  int plant_slivers = 0;
  /// Use this point set instead of sampling.
  std::optional<std::filesystem::path> input_points;

  double epsilon() const { return mu / 100.0; }
  PatchDomain domain() const { return PatchDomain::centered(n, patch_radius, margin); }
  /// QualityParams and domain invariants. Throws ValidationError.
  void validate() const;
};

/// Default output directory: $THICKTRI_OUTPUT_DIR, else "thicktri-out".
std::filesystem::path default_output_dir();

/// Reads a JSON object whose keys mirror the CLI flags (n, mu, patch_radius, margin,
/// seed, mode, output_dir, verbosity, plant_slivers, input_points) onto `base`.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Canonical JSON of the fields that determine the results (output_dir and verbosity
/// are excluded).
std::string config_to_json(const RunConfig& config);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

struct RunManifest {
  std::string config_hash;
  std::map<std::string, std::string> inputs;   ///< file name -> digest
  std::map<std::string, std::string> outputs;  ///< file name -> digest
  std::map<std::string, double> timing;        ///< stage -> seconds; written to timing.json
  std::map<int, double> achieved_d;
  bool pass = false;
  bool vacuous = false;
  int exit_code = 0;
};

/// Manifest JSON without timing, so reruns of a config give identical bytes.
std::string manifest_to_json(const RunManifest& manifest);

/// Point set for the config: loaded from input_points, or a maximal net with planted
/// slivers followed by a genericity jitter of 1e-9 epsilon.
PointSet sample_points(const RunConfig& config);

int cmd_sample(const RunConfig& config, const std::filesystem::path& out);
int cmd_mesh(const RunConfig& config, const std::filesystem::path& in, const std::filesystem::path& out);
int cmd_refine(const RunConfig& config, const std::filesystem::path& in, const std::filesystem::path& out);
/// mu comes from the mesh document when present, else from the config.
int cmd_certify(const RunConfig& config, const std::filesystem::path& in, const std::filesystem::path& out,
                const std::optional<std::filesystem::path>& svg = std::nullopt);
/// Writes to `out`, or to stdout when `out` is empty.
int cmd_constants(int n, double mu, const std::filesystem::path& out);
/// All stages into config.output_dir: points.json, mesh.json, refined.json, stages.json,
/// report.json, report.svg (n = 2), manifest.json, timing.json.
int cmd_pipeline(const RunConfig& config, RunManifest* manifest = nullptr);

}  // namespace thicktri
