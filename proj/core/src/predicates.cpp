#include "thicktri/predicates.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "thicktri/errors.hpp"
#include "thicktri/hyperbolic.hpp"

namespace thicktri::predicates {

namespace {

constexpr int kMaxRows = kMaxDim + 2;

using Row = std::array<double, kMaxRows>;
using Matrix = std::array<Row, kMaxRows>;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Determinant and permanent of |a| by Laplace expansion over column subsets.
// The permanent bounds the rounding error of the expansion.
void det_and_perm(const Matrix& a, int m, double& det, double& perm) {
  std::array<double, 1u << kMaxRows> d{};
  std::array<double, 1u << kMaxRows> p{};
  d[0] = 1.0;
  p[0] = 1.0;
  const unsigned full = (1u << m) - 1u;
  for (unsigned s = 1; s <= full; ++s) {
    const int row = std::popcount(s) - 1;
    double acc = 0.0;
    double pacc = 0.0;
    int greater = std::popcount(s) - 1;
    for (int j = 0; j < m; ++j) {
      if (!(s & (1u << j))) continue;
      const unsigned rest = s & ~(1u << j);
      const double term = a[row][j] * d[rest];
      acc += (greater & 1) ? -term : term;
      pacc += std::abs(a[row][j]) * p[rest];
      --greater;
    }
    d[s] = acc;
    p[s] = pacc;
  }
  det = d[full];
  perm = p[full];
}

int exact_det_sign(std::vector<std::vector<mpq_class>>& a) {
  const int m = static_cast<int>(a.size());
  int sign = 1;
  for (int col = 0; col < m; ++col) {
    int pivot = -1;
    for (int r = col; r < m; ++r) {
      if (sgn(a[r][col]) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      sign = -sign;
    }
    if (sgn(a[col][col]) < 0) sign = -sign;
    for (int r = col + 1; r < m; ++r) {
      if (sgn(a[r][col]) == 0) continue;
      const mpq_class f = a[r][col] / a[col][col];
      for (int c = col; c < m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return sign;
}

// Rows [x, 1].
int orient_rows(std::span<const double* const> pts, int d) {
  ++stats().orient_calls;
  const int m = d + 1;
  Matrix a{};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) a[i][j] = pts[i][j];
    a[i][d] = 1.0;
  }
  double det = 0.0;
  double perm = 0.0;
  det_and_perm(a, m, det, perm);
  const double bound = perm * DBL_EPSILON * (m * (m + 1) + 2);
  if (std::abs(det) > bound) return sign_of(det);

  ++stats().orient_exact;
  std::vector<std::vector<mpq_class>> e(m, std::vector<mpq_class>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) e[i][j] = mpq_class(pts[i][j]);
    e[i][d] = 1;
  }
  return exact_det_sign(e);
}

// Rows [x, |x|^2, 1] for the d+2 points pts.
int lifted_sign(std::span<const double* const> pts, int d) {
  const int m = d + 2;
  Matrix a{};
  for (int i = 0; i < m; ++i) {
    double lift = 0.0;
    for (int j = 0; j < d; ++j) {
      a[i][j] = pts[i][j];
      lift += pts[i][j] * pts[i][j];
    }
    a[i][d] = lift;
    a[i][d + 1] = 1.0;
  }
  double det = 0.0;
  double perm = 0.0;
  det_and_perm(a, m, det, perm);
  const double bound = perm * DBL_EPSILON * (m * (m + 1) + 2 * d + 2);
  if (std::abs(det) > bound) return sign_of(det);

  ++stats().in_sphere_exact;
  std::vector<std::vector<mpq_class>> e(m, std::vector<mpq_class>(m));
  for (int i = 0; i < m; ++i) {
    mpq_class lift = 0;
    for (int j = 0; j < d; ++j) {
      e[i][j] = mpq_class(pts[i][j]);
      lift += e[i][j] * e[i][j];
    }
    e[i][d] = lift;
    e[i][d + 1] = 1;
  }
  return exact_det_sign(e);
}

// Sign of the lifted determinant when the query is strictly inside the
// circumsphere of a positively oriented cell.
int inside_sign(int d) {
  static const std::array<int, kMaxDim + 1> table = [] {
    std::array<int, kMaxDim + 1> t{};
    for (int dim = 1; dim <= kMaxDim; ++dim) {
      std::vector<std::vector<double>> pts(dim + 2, std::vector<double>(dim, 0.0));
      for (int i = 1; i <= dim; ++i) pts[i][i - 1] = 1.0;
      for (int j = 0; j < dim; ++j) pts[dim + 1][j] = 1.0 / (dim + 1);
      std::array<const double*, kMaxRows> ptr{};
      for (int i = 0; i < dim + 2; ++i) ptr[i] = pts[i].data();
      if (orient_rows(std::span<const double* const>(ptr.data(), dim + 1), dim) < 0) {
        std::swap(ptr[0], ptr[1]);
      }
      t[dim] = lifted_sign(std::span<const double* const>(ptr.data(), dim + 2), dim);
    }
    return t;
  }();
  return table[d];
}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw UsageError("predicates: unsupported dimension " + std::to_string(d));
}

}  // namespace

Stats& stats() {
  thread_local Stats s;
  return s;
}

int orient(std::span<const double* const> points, int d) {
  check_dim(d);
  if (static_cast<int>(points.size()) != d + 1) throw UsageError("orient: expected d+1 points");
  return orient_rows(points, d);
}

int in_sphere_exact(std::span<const double* const> cell, const double* q, int d) {
  check_dim(d);
  if (static_cast<int>(cell.size()) != d + 1) throw UsageError("in_sphere: expected d+1 cell vertices");
  std::array<const double*, kMaxRows> rows{};
  for (int i = 0; i <= d; ++i) rows[i] = cell[i];
  rows[d + 1] = q;
  return lifted_sign(std::span<const double* const>(rows.data(), d + 2), d) * inside_sign(d);
}

int in_sphere(std::span<const double* const> cell, std::span<const int> ids, const double* q, int q_id, int d) {
  check_dim(d);
  if (static_cast<int>(cell.size()) != d + 1 || ids.size() != cell.size()) {
    throw UsageError("in_sphere: expected d+1 cell vertices with ids");
  }
  ++stats().in_sphere_calls;
  std::array<const double*, kMaxRows> rows{};
  std::array<int, kMaxRows> row_ids{};
  for (int i = 0; i <= d; ++i) {
    rows[i] = cell[i];
    row_ids[i] = ids[i];
  }
  rows[d + 1] = q;
  row_ids[d + 1] = q_id;
  const int m = d + 2;
  const int s = lifted_sign(std::span<const double* const>(rows.data(), m), d);
  if (s != 0) return s * inside_sign(d);

  // Perturbed lift: L(eps) = L + sum_j eps_j (-1)^(j+d) O(rows without j). The row with
  // the largest id carries the dominant perturbation.
  ++stats().symbolic_ties;
  std::array<int, kMaxRows> order{};
  std::iota(order.begin(), order.begin() + m, 0);
  std::sort(order.begin(), order.begin() + m, [&](int x, int y) { return row_ids[x] > row_ids[y]; });
  for (int k = 0; k < m; ++k) {
    const int j = order[k];
    std::array<const double*, kMaxRows> minor{};
    int c = 0;
    for (int i = 0; i < m; ++i) {
      if (i != j) minor[c++] = rows[i];
    }
    const int o = orient_rows(std::span<const double* const>(minor.data(), d + 1), d);
    if (o != 0) {
      const int cofactor_sign = ((j + d) % 2 == 0) ? o : -o;
      return cofactor_sign * inside_sign(d);
    }
  }
  throw DegeneracyError("in_sphere: fully degenerate configuration");
}

}  // namespace thicktri::predicates
