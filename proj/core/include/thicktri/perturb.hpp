#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "thicktri/delaunay.hpp"
#include "thicktri/net.hpp"
#include "thicktri/quality.hpp"

namespace thicktri {

enum class Mode { theoretical, adaptive };

std::string to_string(Mode mode);
/// Throws UsageError for anything but "theoretical" or "adaptive".
Mode parse_mode(std::string_view text);

struct PerturbOptions {
  Mode mode = Mode::adaptive;
  std::uint64_t seed = 0;
  /// Theoretical mode: rejection-sampling budget before InfeasibleError.
  std::size_t max_trials = 1'000'000;
  /// Adaptive mode: trials per altitude level before the level is halved.
  std::size_t level_trials = 10'000;
  /// Adaptive mode: first target for d_{k+1}, as a fraction of d_k.
  double start_factor = 0.1;
  int max_halvings = 200;
};

/// Working state of one dimension stage.
struct StageState {
  StageState(SimplexComplex complex, int k, std::uint64_t seed, Mode mode);

  int k;
  SimplexComplex complex;
  std::vector<int> processed;
  std::uint64_t seed;
  Mode mode;
  /// Vertices perturbed in every stage: within the shrunk domain (plus delta) at
  /// construction time, or all vertices when the complex has no domain.
  std::vector<char> movable;
  NeighborIndex index;
};

/// Facet tuples that may form a simplex of dimension <= k+1 with vertex v after a
/// move of at most delta_{k+1}: tuples of 1..k+1 vertices within b + 2 delta_{k+1} of v
/// whose distances to v and to each other lie in [a - 2 delta_{k+1}, b + 2 delta_{k+1}].
std::vector<Simplex> candidate_simplices(int v, const StageState& state, const QualityParams& params);

struct Placement {
  HPoint position;
  double d = 0.0;           ///< altitude level the placement satisfies
  std::size_t trials = 0;
  int halvings = 0;
};

/// A position within `radius` of v avoiding every candidate's bad simplices at level d.
/// Adaptive mode halves d after each exhausted level; theoretical mode throws
/// InfeasibleError after max_trials.
Placement find_good_position(int v, const std::vector<Simplex>& candidates, double radius, double d,
                             const StageState& state, const QualityParams& params,
                             const PerturbOptions& options);

struct StageReport {
  int k = 0;
  double target_d = 0.0;
  double achieved_d = 0.0;
  std::size_t moved = 0;
  std::size_t max_candidates = 0;
  std::size_t total_trials = 0;
  std::size_t star_rebuilds = 0;
  int max_halvings = 0;
  double max_displacement = 0.0;
  std::size_t bad_after = 0;  ///< interior faces of dimension 2..k+1 failing the audit
};

/// Perturbs every movable vertex once, in ascending id order, then audits the faces
/// of interior top cells. Advances state.k.
StageReport run_stage(StageState& state, QualityParams& params, const PerturbOptions& options);

struct RefineResult {
  SimplexComplex complex;
  std::map<int, double> achieved_d;
  std::vector<StageReport> stages;
  double max_displacement = 0.0;
};

/// Runs stages k = 2..n-1 on a Delaunay complex. achieved_d[2] is d_2 = h0(a, b, c).
RefineResult refine(const SimplexComplex& initial, QualityParams params, const PerturbOptions& options);

/// Interior faces of dimension 2..max_dim that fail is_good(a, b, d).
std::vector<Simplex> audit_interior_faces(const SimplexComplex& complex, int max_dim, double a, double b,
                                          double d);

}  // namespace thicktri
