// thicktri: sample, triangulate, refine and certify meshes of hyperbolic patches.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "thicktri/errors.hpp"
#include "thicktri/pipeline.hpp"

namespace {

using thicktri::RunConfig;

struct Flags {
  std::string config_file;
  int n = 3;
  double mu = 5.0;
  double patch_radius = 1.0;
  double margin = 0.5;
  std::uint64_t seed = 1;
  std::string mode = "adaptive";
  std::string output_dir;
  int verbosity = 0;
  int plant_slivers = 0;
  std::string input_points;
};

struct Options {
  CLI::Option* n = nullptr;
  CLI::Option* mu = nullptr;
  CLI::Option* patch_radius = nullptr;
  CLI::Option* margin = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* mode = nullptr;
  CLI::Option* output_dir = nullptr;
  CLI::Option* verbosity = nullptr;
  CLI::Option* plant_slivers = nullptr;
  CLI::Option* input_points = nullptr;
};

Options add_run_flags(CLI::App* app, Flags& f) {
  Options o;
  app->add_option("--config", f.config_file, "JSON config file; flags override its values");
  o.n = app->add_option("-n,--dim", f.n, "Dimension of the hyperbolic space");
  o.mu = app->add_option("--mu", f.mu, "Thickness parameter; epsilon = mu/100");
  o.patch_radius = app->add_option("--patch-radius", f.patch_radius, "Radius of the patch ball");
  o.margin = app->add_option("--margin", f.margin, "Boundary margin excluded from the guarantee");
  o.seed = app->add_option("--seed", f.seed, "Random seed");
  o.mode = app->add_option("--mode", f.mode, "theoretical or adaptive")->check(CLI::IsMember({"theoretical", "adaptive"}));
  o.verbosity = app->add_flag("-v,--verbose", f.verbosity, "Increase log output");
  return o;
}

RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig c;
  c.output_dir = thicktri::default_output_dir();
  if (!f.config_file.empty()) c = thicktri::load_config(f.config_file, c);
  if (o.n && o.n->count()) c.n = f.n;
  if (o.mu && o.mu->count()) c.mu = f.mu;
  if (o.patch_radius && o.patch_radius->count()) c.patch_radius = f.patch_radius;
  if (o.margin && o.margin->count()) c.margin = f.margin;
  if (o.seed && o.seed->count()) c.seed = f.seed;
  if (o.mode && o.mode->count()) c.mode = thicktri::parse_mode(f.mode);
  if (o.verbosity && o.verbosity->count()) c.verbosity = f.verbosity;
  if (o.output_dir && o.output_dir->count()) c.output_dir = f.output_dir;
  if (o.plant_slivers && o.plant_slivers->count()) c.plant_slivers = f.plant_slivers;
  if (o.input_points && o.input_points->count()) c.input_points = std::filesystem::path(f.input_points);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thick triangulations of hyperbolic patches"};
  app.require_subcommand(1);

  Flags f;
  std::string in;
  std::string out;
  std::string svg;

  auto* sample = app.add_subcommand("sample", "Sample a maximal epsilon-net of the patch");
  Options sample_opts = add_run_flags(sample, f);
  sample_opts.plant_slivers = sample->add_option("--plant-slivers", f.plant_slivers, "Flat tetrahedra to plant");
  sample->add_option("-o,--output", out, "Point set JSON")->required();

  auto* mesh = app.add_subcommand("mesh", "Delaunay triangulation of a point set");
  Options mesh_opts = add_run_flags(mesh, f);
  mesh->add_option("input", in, "Point set JSON")->required()->check(CLI::ExistingFile);
  mesh->add_option("-o,--output", out, "Mesh JSON")->required();

  auto* refine = app.add_subcommand("refine", "Perturb vertices to remove bad simplices");
  Options refine_opts = add_run_flags(refine, f);
  refine->add_option("input", in, "Mesh JSON")->required()->check(CLI::ExistingFile);
  refine->add_option("-o,--output", out, "Refined mesh JSON")->required();

  auto* cert = app.add_subcommand("certify", "Audit the interior cells of a mesh");
  Options cert_opts = add_run_flags(cert, f);
  cert->add_option("input", in, "Mesh JSON")->required()->check(CLI::ExistingFile);
  cert->add_option("-o,--output", out, "Report JSON")->required();
  cert->add_option("--svg", svg, "Poincare disk drawing (n = 2 only)");

  auto* constants = app.add_subcommand("constants", "Print the bound ledger for (n, mu)");
  Options const_opts;
  const_opts.n = constants->add_option("-n,--dim", f.n, "Dimension");
  const_opts.mu = constants->add_option("--mu", f.mu, "Thickness parameter");
  constants->add_option("-o,--output", out, "Ledger JSON (stdout when omitted)");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write a manifest");
  Options pipe_opts = add_run_flags(pipeline, f);
  pipe_opts.output_dir = pipeline->add_option("-o,--output-dir", f.output_dir, "Directory for all artifacts");
  pipe_opts.plant_slivers = pipeline->add_option("--plant-slivers", f.plant_slivers, "Flat tetrahedra to plant");
  pipe_opts.input_points = pipeline->add_option("--input-points", f.input_points, "Use this point set instead of sampling")
                               ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : thicktri::kExitUsage;
  }

  try {
    if (*sample) return thicktri::cmd_sample(resolve(f, sample_opts), out);
    if (*mesh) return thicktri::cmd_mesh(resolve(f, mesh_opts), in, out);
    if (*refine) return thicktri::cmd_refine(resolve(f, refine_opts), in, out);
    if (*cert) {
      std::optional<std::filesystem::path> svg_path;
      if (!svg.empty()) svg_path = svg;
      return thicktri::cmd_certify(resolve(f, cert_opts), in, out, svg_path);
    }
    if (*constants) return thicktri::cmd_constants(f.n, f.mu, out);
    if (*pipeline) return thicktri::cmd_pipeline(resolve(f, pipe_opts));
  } catch (const thicktri::ParseError& e) {
    std::cerr << "parse error (line " << e.line() << ", column " << e.column() << "): " << e.what() << '\n';
    return thicktri::kExitUsage;
  } catch (const thicktri::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return thicktri::kExitUsage;
  } catch (const thicktri::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return thicktri::kExitUsage;
  } catch (const thicktri::StageFailure& e) {
    std::cerr << "stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return thicktri::kExitStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return thicktri::kExitStageFailure;
  }
  return thicktri::kExitUsage;
}
