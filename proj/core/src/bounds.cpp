#include "thicktri/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "thicktri/errors.hpp"

namespace thicktri {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kScheduleFloor = 1e-300;
constexpr double kScheduleRelTol = 1e-6;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Golden-section minimization of f on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, double& arg) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  arg = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

}  // namespace

double d_bound(double b, double d0, double d) {
  if (!(b > 0.0) || !(d0 > 0.0)) throw UsageError("d_bound: b and d0 must be positive");
  if (!(d >= 0.0)) throw UsageError("d_bound: d must be non-negative");
  if (d == 0.0) return 0.0;
  return std::asinh(std::sinh(d) / std::sinh(d0) * std::sinh(b));
}

double chord_tangent_angle(double rho, double s) {
  if (!(s > 0.0) || !(rho >= s)) throw UsageError("chord_tangent_angle: need 0 < s <= rho");
  // Right triangle center / chord midpoint / chord endpoint: legs h and s, hypotenuse rho.
  const double cosh_h = std::max(1.0, std::cosh(rho) / std::cosh(s));
  const double tanh_h = std::sqrt(1.0 - 1.0 / (cosh_h * cosh_h));
  return kHalfPi - std::atan2(tanh_h, std::sinh(s));
}

double alpha0(double a, double c) {
  if (!(a > 0.0) || !(0.5 * a <= c) || !std::isfinite(c)) {
    throw UsageError("alpha0: need 0 < a/2 <= c (a = " + num(a) + ", c = " + num(c) + ")");
  }
  const double s0 = 0.5 * a;
  if (c == s0) return kHalfPi;
  auto angle = [&](double rho, double t) { return chord_tangent_angle(rho, std::min(rho, s0 + t * (rho - s0))); };

  constexpr int kGrid = 64;
  double best = kHalfPi;
  double best_rho = c;
  double best_t = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double rho = s0 + (c - s0) * i / kGrid;
    for (int j = 0; j <= kGrid; ++j) {
      const double t = static_cast<double>(j) / kGrid;
      const double v = angle(rho, t);
      if (v < best) {
        best = v;
        best_rho = rho;
        best_t = t;
      }
    }
  }
  // Alternate golden-section refinements inside the neighboring grid cells.
  const double drho = (c - s0) / kGrid;
  double rho_lo = std::max(s0, best_rho - drho);
  double rho_hi = std::min(c, best_rho + drho);
  double t_lo = std::max(0.0, best_t - 1.0 / kGrid);
  double t_hi = std::min(1.0, best_t + 1.0 / kGrid);
  for (int round = 0; round < 4; ++round) {
    double arg = best_rho;
    double v = golden_min([&](double r) { return angle(r, best_t); }, rho_lo, rho_hi, arg);
    if (v < best) {
      best = v;
      best_rho = arg;
    }
    v = golden_min([&](double t) { return angle(best_rho, t); }, t_lo, t_hi, arg);
    if (v < best) {
      best = v;
      best_t = arg;
    }
  }
  for (double rho : {s0, c}) {
    for (double t : {0.0, 1.0}) best = std::min(best, angle(rho, t));
  }
  return best;
}

double r_bound(double a, double b, double c, double d0, double d) {
  const double D = d_bound(b, d0, d);
  if (D == 0.0) return 0.0;
  return D + std::asinh(std::sinh(D) / std::sin(alpha0(a, c)));
}

double vk_bound(int n, int k, double a, double b, double c, double d0, double d) {
  if (k < 2 || k > n) throw UsageError("vk_bound: need 2 <= k <= n");
  const double R = r_bound(a, b, c, d0, d);
  if (R == 0.0) return 0.0;
  return shell_volume_about(n, c, R);
}

std::uint64_t m_count_eps(int n, double epsilon, double delta) {
  const double inner = 0.5 * epsilon - delta;
  if (!(inner > 0.0)) throw BoundDomainError("m_count: epsilon/2 - delta = " + num(inner) + " is not positive");
  const double ratio = ball_volume(n, 2.0 * epsilon + 2.0 * delta) / ball_volume(n, inner);
  if (!(ratio < 1.8e19)) throw std::overflow_error("m_count: volume quotient exceeds 64 bits");
  return static_cast<std::uint64_t>(std::floor(ratio));
}

std::uint64_t m_count(int n, double mu) {
  if (!(mu > 0.0)) throw UsageError("m_count: mu must be positive");
  const double eps = mu / 100.0;
  return m_count_eps(n, eps, eps / 10.0);
}

__extension__ using Wide = unsigned __int128;

std::uint64_t binomial(std::uint64_t m, std::uint64_t k) {
  if (k > m) return 0;
  k = std::min(k, m - k);
  Wide r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (m - k + i) / i stays integral at every step.
    r = r * (m - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("binomial: exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t n_count(int n, int k, double mu) {
  if (k < 1) throw UsageError("n_count: k must be at least 1");
  return binomial(m_count(n, mu), static_cast<std::uint64_t>(k));
}

double h1_bound(double a, double r0) {
  if (!(a > 0.0) || !(r0 > 0.0)) throw UsageError("h1_bound: a and r0 must be positive");
  const double cos_alpha = (std::cosh(a) * std::cosh(r0) - std::cosh(r0)) / (std::sinh(a) * std::sinh(r0));
  if (!(cos_alpha >= -1.0 && cos_alpha <= 1.0 + 1e-15)) {
    throw BoundDomainError("h1_bound: cos(alpha) = " + num(cos_alpha) + " outside [-1, 1] (need a/2 <= r0)");
  }
  const double c2 = std::min(1.0, cos_alpha);
  const double sin_alpha = std::sqrt((1.0 - c2) * (1.0 + c2));
  const double qx = std::asinh(std::sinh(a) * sin_alpha);
  // cosh(a) cosh(qx) - sinh(a) sinh(qx) = cosh(a - qx); taking a - qx avoids acosh near 1.
  const double h1 = a - qx;
  if (!(h1 >= 0.0)) throw BoundDomainError("h1_bound: |qx| = " + num(qx) + " exceeds a");
  return h1;
}

double h0_bound(double a, double b, double R) {
  if (!(a > 0.0) || !(a <= b)) throw UsageError("h0_bound: need 0 < a <= b");
  return std::asinh(std::sinh(a) / std::sinh(b) * std::sinh(h1_bound(a, R)));
}

double stage_bad_volume(const QualityParams& params, int k, double d) {
  const int n = params.n;
  const std::uint64_t m = m_count_eps(n, params.epsilon, params.delta);
  const double v = vk_bound(n, std::min(k + 1, n), params.a, params.b, params.c, params.d_at(2), d);
  double total = 0.0;
  for (int l = 1; l <= k + 1; ++l) total += v * static_cast<double>(binomial(m, static_cast<std::uint64_t>(l)));
  return total;
}

double stage_ball_volume(const QualityParams& params, int k) {
  return ball_volume(params.n, params.delta_at(k + 1));
}

std::map<int, double> solve_d_schedule(int n, double mu, const QualityParams& params) {
  if (params.n != n || std::abs(params.mu - mu) > 1e-12 * mu) {
    throw UsageError("solve_d_schedule: parameters were built for a different (n, mu)");
  }
  std::map<int, double> schedule;
  schedule[2] = params.d_at(2);
  for (int k = 2; k < n; ++k) {
    const double budget = stage_ball_volume(params, k);
    const double dk = schedule[k];
    auto feasible = [&](double d) { return stage_bad_volume(params, k, d) <= budget; };
    if (feasible(dk)) {
      schedule[k + 1] = dk;
      continue;
    }
    double hi = std::log(dk);
    double lo = hi;
    do {
      lo -= 8.0 * std::log(2.0);
      if (std::exp(lo) < kScheduleFloor) {
        throw InfeasibleError("solve_d_schedule: no d_" + std::to_string(k + 1) + " above 1e-300");
      }
    } while (!feasible(std::exp(lo)));
    while (hi - lo > kScheduleRelTol) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(std::exp(mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    schedule[k + 1] = std::exp(lo);
  }
  return schedule;
}

BoundLedger compute_ledger(int n, double mu) {
  BoundLedger L;
  L.n = n;
  L.mu = mu;
  L.params = QualityParams::from_mu(n, mu);
  const auto& p = L.params;
  L.alpha0 = alpha0(p.a, p.c);
  L.h1 = h1_bound(p.a, p.c);
  L.h0 = h0_bound(p.a, p.b, p.c);
  L.m = m_count(n, mu);
  for (int l = 1; l <= n; ++l) L.N[l] = n_count(n, l, mu);
  L.d = solve_d_schedule(n, mu, p);
  L.params.d = L.d;
  for (int k = 3; k <= n; ++k) {
    const double dk = L.d[k];
    L.D[k] = d_bound(p.b, L.d[2], dk);
    L.R[k] = r_bound(p.a, p.b, p.c, L.d[2], dk);
    L.V[k] = vk_bound(n, k, p.a, p.b, p.c, L.d[2], dk);
    L.budget[k] = ball_volume(n, p.delta_at(k));
  }
  return L;
}

}  // namespace thicktri
