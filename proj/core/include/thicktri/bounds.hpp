#pragma once

// Explicit constants of the altitude argument: the altitude bound D, the circumsphere
// neighborhood radius R with its angle alpha0, bad-region volume V, the candidate
// counts m and N, the triangle bounds h1 and h0, and the d_k schedule.

#include <cstdint>
#include <map>

#include "thicktri/quality.hpp"

namespace thicktri {

/// asinh(sinh(d) sinh(b) / sinh(d0)).
double d_bound(double b, double d0, double d);

/// Angle between a chord and the tangent at its endpoint for a circle of radius rho
/// whose chord has half-length s (s <= rho).
double chord_tangent_angle(double rho, double s);

/// Smallest chord-tangent angle over circle radii in [a/2, c] and chord half-lengths
/// in [a/2, rho]. Throws UsageError unless 0 < a/2 <= c.
double alpha0(double a, double c);

/// D + asinh(sinh(D) / sin(alpha0(a, c))) with D = d_bound(b, d0, d).
double r_bound(double a, double b, double c, double d0, double d);

/// Volume of the shell of width 2R about a sphere of radius c, R = r_bound(...), 2 <= k <= n.
double vk_bound(int n, int k, double a, double b, double c, double d0, double d);

/// floor(vol B(2 eps + 2 delta) / vol B(eps/2 - delta)).
std::uint64_t m_count(int n, double mu);
std::uint64_t m_count_eps(int n, double epsilon, double delta);

/// C(m_count(n, mu), k); 0 when k > m. Throws std::overflow_error past 2^64.
std::uint64_t n_count(int n, int k, double mu);
std::uint64_t binomial(std::uint64_t m, std::uint64_t k);

/// Lower bound on the altitude from a vertex that projects inside the opposite edge,
/// for triangles on a circle of radius r0 with edges >= a. Requires a/2 <= r0.
double h1_bound(double a, double r0);
/// asinh(sinh(a) / sinh(b) * sinh(h1(a, R))).
double h0_bound(double a, double b, double R);

/// Left side of the per-stage volume inequality:
/// sum_{l=1}^{k+1} vk_bound(l) * n_count(l), evaluated at d_{k+1} = d.
double stage_bad_volume(const QualityParams& params, int k, double d);
/// Right side: vol B(delta_{k+1}).
double stage_ball_volume(const QualityParams& params, int k);

/// d_2 = params.d[2]; for k = 2..n-1 the largest d_{k+1} <= d_k (bisection in log d,
/// relative tolerance 1e-6) with stage_bad_volume <= stage_ball_volume.
/// Throws InfeasibleError when no d above 1e-300 qualifies.
std::map<int, double> solve_d_schedule(int n, double mu, const QualityParams& params);

struct BoundLedger {
  int n = 0;
  double mu = 0.0;
  QualityParams params;
  double alpha0 = 0.0;
  double h1 = 0.0;  ///< h1(a, c)
  double h0 = 0.0;  ///< h0(a, b, c) = d_2
  std::uint64_t m = 0;
  std::map<int, std::uint64_t> N;  ///< l = 1..n
  std::map<int, double> d;         ///< k = 2..n
  std::map<int, double> D;         ///< k = 3..n: d_bound(b, d_2, d_k)
  std::map<int, double> R;         ///< k = 3..n: r_bound(a, b, c, d_2, d_k)
  std::map<int, double> V;         ///< k = 3..n: vk_bound at d_k
  std::map<int, double> budget;    ///< k = 3..n: vol B(delta_k)
};

BoundLedger compute_ledger(int n, double mu);

}  // namespace thicktri
