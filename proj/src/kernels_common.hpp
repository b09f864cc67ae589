#pragma once

// Per-cell arithmetic shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pwiener::kernels::detail {

/// |v|^e for v >= 0, with the common exponents special-cased.
inline double power(double v, double e) {
  if (e == 0.0) return 1.0;
  if (e == 0.5) return std::sqrt(v);
  if (e == 1.0) return v;
  if (e == 1.5) return v * std::sqrt(v);
  if (e == 2.0) return v * v;
  return std::pow(v, e);
}

/// Edge differences of 2D cell with lower-left node k: bottom, top, left, right.
struct CellEdges {
  double b, t, l, r;
};

inline CellEdges cell_edges(const double* u, std::size_t k, std::size_t n) {
  const double u00 = u[k], u10 = u[k + 1], u01 = u[k + n], u11 = u[k + n + 1];
  return {u10 - u00, u11 - u01, u01 - u00, u11 - u10};
}

/// Corner order: (b,l), (b,r), (t,l), (t,r).
inline double cell_energy_2d(const CellEdges& e, double inv_h2, double half_p) {
  return power((e.b * e.b + e.l * e.l) * inv_h2, half_p) + power((e.b * e.b + e.r * e.r) * inv_h2, half_p) +
         power((e.t * e.t + e.l * e.l) * inv_h2, half_p) + power((e.t * e.t + e.r * e.r) * inv_h2, half_p);
}

/// sum_c |g_c|^(p-2) (g_c(u) . g_c(d)) * h^2 over the four corners.
inline double cell_derivative_2d(const CellEdges& e, const CellEdges& d, double inv_h2, double pm2_half) {
  auto corner = [&](double a, double c, double da, double dc) {
    const double s = (a * a + c * c) * inv_h2;
    return power(s, pm2_half) * (a * da + c * dc);
  };
  return corner(e.b, e.l, d.b, d.l) + corner(e.b, e.r, d.b, d.r) + corner(e.t, e.l, d.t, d.l) +
         corner(e.t, e.r, d.t, d.r);
}

inline double corner_weight(double sq_grad, double floor, double pm2) {
  return power(std::max(std::sqrt(sq_grad), floor), pm2);
}

// Grouping of every reduction: partial sums over fixed blocks (or rows of
// cells), added in index order. The OpenMP kernels fill the partials in
// parallel; these serial versions fill them in a loop.
template <class F>
double blocked_sum(std::size_t count, std::size_t block, F&& f) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < count; lo += block) {
    const std::size_t hi = std::min(count, lo + block);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += f(k);
    total += s;
  }
  return total;
}

template <class F>
double row_sum(std::size_t rows, std::size_t cols, F&& f) {
  double total = 0.0;
  for (std::size_t j = 0; j < rows; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < cols; ++i) s += f(j, i);
    total += s;
  }
  return total;
}

}  // namespace pwiener::kernels::detail
