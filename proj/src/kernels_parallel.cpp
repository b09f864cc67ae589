#include <omp.h>

#include <cmath>
#include <vector>

#include "kernels_common.hpp"
#include "pwiener/kernels.hpp"

namespace pwiener::kernels::parallel {

using detail::cell_edges;
using detail::power;

namespace {

// Sum of f(k) for k in [0, count), blocked so the result is independent of
// the number of threads.
template <class F>
double blocked_sum(std::size_t count, F&& f) {
  const std::size_t nblocks = (count + reduction_block - 1) / reduction_block;
  std::vector<double> partial(nblocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
    const std::size_t hi = std::min(count, lo + reduction_block);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += f(k);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

// Same for row-structured 2D sums: one partial per row of cells.
template <class F>
double row_sum(std::size_t rows, std::size_t cols, F&& f) {
  std::vector<double> partial(rows, 0.0);
  const auto nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < nr; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < cols; ++i) s += f(static_cast<std::size_t>(j), i);
    partial[static_cast<std::size_t>(j)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace

double energy(const NodeGrid& grid, std::span<const double> u, double p) {
  const auto n = static_cast<std::size_t>(grid.n);
  const double h = grid.h;
  if (grid.dim == 1) {
    return blocked_sum(n - 1, [&](std::size_t k) { return h * power(std::abs(u[k + 1] - u[k]) / h, p); });
  }
  const double inv_h2 = 1.0 / (h * h);
  const double s = row_sum(n - 1, n - 1, [&](std::size_t j, std::size_t i) {
    return detail::cell_energy_2d(cell_edges(u.data(), j * n + i, n), inv_h2, 0.5 * p);
  });
  return 0.25 * h * h * s;
}

double energy_derivative(const NodeGrid& grid, std::span<const double> u, std::span<const double> d, double p) {
  const auto n = static_cast<std::size_t>(grid.n);
  const double h = grid.h;
  if (grid.dim == 1) {
    return p * blocked_sum(n - 1, [&](std::size_t k) {
             const double g = (u[k + 1] - u[k]) / h;
             return power(std::abs(g), p - 2.0) * g * (d[k + 1] - d[k]);
           });
  }
  const double inv_h2 = 1.0 / (h * h);
  const double s = row_sum(n - 1, n - 1, [&](std::size_t j, std::size_t i) {
    const std::size_t k = j * n + i;
    return detail::cell_derivative_2d(cell_edges(u.data(), k, n), cell_edges(d.data(), k, n), inv_h2,
                                      0.5 * (p - 2.0));
  });
  return 0.25 * p * s;
}

void edge_weights(const NodeGrid& grid, std::span<const double> u, double p, double floor, EdgeWeights& out) {
  const auto n = static_cast<std::size_t>(grid.n);
  const std::size_t total = grid.size();
  const double h = grid.h;
  const double pm2 = p - 2.0;
  out.wx.assign(total, 0.0);
  out.wy.assign(grid.dim == 2 ? total : 0, 0.0);
  if (grid.dim == 1) {
    const auto m = static_cast<std::ptrdiff_t>(n - 1);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < m; ++k) {
      const double g = (u[static_cast<std::size_t>(k) + 1] - u[static_cast<std::size_t>(k)]) / h;
      out.wx[static_cast<std::size_t>(k)] = detail::corner_weight(g * g, floor, pm2) / h;
    }
    return;
  }
  const std::size_t nc = n - 1;
  out.corner.resize(nc * nc * 4);
  const double inv_h2 = 1.0 / (h * h);
  const auto rows = static_cast<std::ptrdiff_t>(nc);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < rows; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      for (std::size_t i = 0; i < nc; ++i) {
        const auto e = cell_edges(u.data(), j * n + i, n);
        double* c = &out.corner[(j * nc + i) * 4];
        c[0] = detail::corner_weight((e.b * e.b + e.l * e.l) * inv_h2, floor, pm2);
        c[1] = detail::corner_weight((e.b * e.b + e.r * e.r) * inv_h2, floor, pm2);
        c[2] = detail::corner_weight((e.t * e.t + e.l * e.l) * inv_h2, floor, pm2);
        c[3] = detail::corner_weight((e.t * e.t + e.r * e.r) * inv_h2, floor, pm2);
      }
    }
    // Gather: every edge collects from the (up to two) cells containing it,
    // in the same order as the serial scatter.
#pragma omp for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(n); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = j * n + i;
        if (i < nc) {
          double wx = 0.0;
          if (j >= 1) {
            const double* c = &out.corner[((j - 1) * nc + i) * 4];
            wx += 0.25 * (c[2] + c[3]);
          }
          if (j < nc) {
            const double* c = &out.corner[(j * nc + i) * 4];
            wx += 0.25 * (c[0] + c[1]);
          }
          out.wx[k] = wx;
        }
        if (j < nc) {
          double wy = 0.0;
          if (i >= 1) {
            const double* c = &out.corner[(j * nc + i - 1) * 4];
            wy += 0.25 * (c[1] + c[3]);
          }
          if (i < nc) {
            const double* c = &out.corner[(j * nc + i) * 4];
            wy += 0.25 * (c[0] + c[2]);
          }
          out.wy[k] = wy;
        }
      }
    }
  }
}

void apply(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
           std::span<const double> x, std::span<double> y) {
  const int n = grid.n;
  const auto nn = static_cast<std::size_t>(n);
  if (grid.dim == 1) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (fixed[k]) {
        y[k] = 0.0;
        continue;
      }
      double acc = mass * x[k];
      if (i > 0) acc += w.wx[k - 1] * (x[k] - x[k - 1]);
      if (i < n - 1) acc += w.wx[k] * (x[k] - x[k + 1]);
      y[k] = acc;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i);
      if (fixed[k]) {
        y[k] = 0.0;
        continue;
      }
      double acc = mass * x[k];
      if (i > 0) acc += w.wx[k - 1] * (x[k] - x[k - 1]);
      if (i < n - 1) acc += w.wx[k] * (x[k] - x[k + 1]);
      if (j > 0) acc += w.wy[k - nn] * (x[k] - x[k - nn]);
      if (j < n - 1) acc += w.wy[k] * (x[k] - x[k + nn]);
      y[k] = acc;
    }
  }
}

void diagonal(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
              std::span<double> diag) {
  const int n = grid.n;
  const auto nn = static_cast<std::size_t>(n);
  const auto total = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t kk = 0; kk < total; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    if (fixed[k]) {
      diag[k] = 1.0;
      continue;
    }
    const int i = static_cast<int>(k % nn);
    const int j = static_cast<int>(k / nn);
    double acc = mass;
    if (i > 0) acc += w.wx[k - 1];
    if (i < n - 1) acc += w.wx[k];
    if (grid.dim == 2) {
      if (j > 0) acc += w.wy[k - nn];
      if (j < n - 1) acc += w.wy[k];
    }
    diag[k] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t k) { return a[k] * b[k]; });
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto m = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t k = 0; k < m; ++k) y[static_cast<std::size_t>(k)] += a * x[static_cast<std::size_t>(k)];
}

}  // namespace pwiener::kernels::parallel
