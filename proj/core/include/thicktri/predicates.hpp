#pragma once

// Euclidean orientation and in-sphere predicates in R^d, d <= kMaxDim.
//
// Both are evaluated in double precision with a forward error bound; when the
// sign is uncertain they are re-evaluated exactly with GMP rationals. Exact
// in-sphere ties are broken by symbolic perturbation of the lifted coordinate
// |x|^2 + eps^(rank of id), larger ids perturbed more. The perturbed configuration
// is generic, so in_sphere never returns 0 unless every relevant orientation is
// degenerate, in which case it throws DegeneracyError.

#include <cstdint>
#include <span>

namespace thicktri::predicates {

/// Sign of det[[p_0, 1], ..., [p_d, 1]] for d+1 points with d coordinates each.
int orient(std::span<const double* const> points, int d);

/// +1 if q lies inside the circumsphere of the positively oriented cell, -1 if outside.
/// `ids` carry the symbolic-perturbation ranks of the cell vertices; `q_id` that of q.
int in_sphere(std::span<const double* const> cell, std::span<const int> ids, const double* q, int q_id, int d);

/// Same predicate without symbolic perturbation: +1 inside, 0 on the sphere, -1 outside.
int in_sphere_exact(std::span<const double* const> cell, const double* q, int d);

struct Stats {
  std::uint64_t orient_calls = 0;
  std::uint64_t orient_exact = 0;
  std::uint64_t in_sphere_calls = 0;
  std::uint64_t in_sphere_exact = 0;
  std::uint64_t symbolic_ties = 0;
};

/// Per-thread counters, for tests and benchmarks.
Stats& stats();

}  // namespace thicktri::predicates
