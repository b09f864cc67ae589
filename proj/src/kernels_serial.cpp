#include <cmath>

#include "kernels_common.hpp"
#include "pwiener/kernels.hpp"

namespace pwiener::kernels::serial {

using detail::cell_edges;
using detail::power;

double energy(const NodeGrid& grid, std::span<const double> u, double p) {
  const auto n = static_cast<std::size_t>(grid.n);
  const double h = grid.h;
  if (grid.dim == 1) {
    return detail::blocked_sum(n - 1, reduction_block,
                               [&](std::size_t k) { return h * power(std::abs(u[k + 1] - u[k]) / h, p); });
  }
  const double inv_h2 = 1.0 / (h * h);
  const double s = detail::row_sum(n - 1, n - 1, [&](std::size_t j, std::size_t i) {
    return detail::cell_energy_2d(cell_edges(u.data(), j * n + i, n), inv_h2, 0.5 * p);
  });
  return 0.25 * h * h * s;
}

double energy_derivative(const NodeGrid& grid, std::span<const double> u, std::span<const double> d, double p) {
  const auto n = static_cast<std::size_t>(grid.n);
  const double h = grid.h;
  if (grid.dim == 1) {
    return p * detail::blocked_sum(n - 1, reduction_block, [&](std::size_t k) {
             const double g = (u[k + 1] - u[k]) / h;
             return power(std::abs(g), p - 2.0) * g * (d[k + 1] - d[k]);
           });
  }
  const double inv_h2 = 1.0 / (h * h);
  const double s = detail::row_sum(n - 1, n - 1, [&](std::size_t j, std::size_t i) {
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
    for (std::size_t k = 0; k + 1 < n; ++k) {
      out.wx[k] = detail::corner_weight(power((u[k + 1] - u[k]) / h, 2.0), floor, pm2) / h;
    }
    return;
  }
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t k = j * n + i;
      const auto e = cell_edges(u.data(), k, n);
      const double w_bl = detail::corner_weight((e.b * e.b + e.l * e.l) * inv_h2, floor, pm2);
      const double w_br = detail::corner_weight((e.b * e.b + e.r * e.r) * inv_h2, floor, pm2);
      const double w_tl = detail::corner_weight((e.t * e.t + e.l * e.l) * inv_h2, floor, pm2);
      const double w_tr = detail::corner_weight((e.t * e.t + e.r * e.r) * inv_h2, floor, pm2);
      out.wx[k] += 0.25 * (w_bl + w_br);          // bottom edge
      out.wx[k + n] += 0.25 * (w_tl + w_tr);      // top edge
      out.wy[k] += 0.25 * (w_bl + w_tl);          // left edge
      out.wy[k + 1] += 0.25 * (w_br + w_tr);      // right edge
    }
  }
}

void apply(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
           std::span<const double> x, std::span<double> y) {
  const int n = grid.n;
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (fixed[k]) {
      y[k] = 0.0;
      continue;
    }
    const auto [i, j] = grid.multi_index(k);
    double acc = mass * x[k];
    if (i > 0) acc += w.wx[k - 1] * (x[k] - x[k - 1]);
    if (i < n - 1) acc += w.wx[k] * (x[k] - x[k + 1]);
    if (grid.dim == 2) {
      if (j > 0) acc += w.wy[k - nn] * (x[k] - x[k - nn]);
      if (j < n - 1) acc += w.wy[k] * (x[k] - x[k + nn]);
    }
    y[k] = acc;
  }
}

void diagonal(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
              std::span<double> diag) {
  const int n = grid.n;
  const auto nn = static_cast<std::size_t>(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (fixed[k]) {
      diag[k] = 1.0;
      continue;
    }
    const auto [i, j] = grid.multi_index(k);
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
  return detail::blocked_sum(a.size(), reduction_block, [&](std::size_t k) { return a[k] * b[k]; });
}

}  // namespace pwiener::kernels::serial
