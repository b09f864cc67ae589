#pragma once

// Grid kernels of the discrete p-Dirichlet energy
//
//   E(u) = sum_cells h^N 2^-N sum_corners |g_c(u)|^p,
//
// where g_c is the gradient built from the two (N = 2) or one (N = 1)
// cell edges meeting at corner c. Every kernel exists twice: `serial` is
// the plain reference kept for testing, `parallel` is the OpenMP version
// used by the solvers. Both sum reductions over fixed-size blocks (rows of
// cells in 2D) in index order, so the two agree bit for bit at any thread
// count.

#include <cstdint>
#include <span>
#include <vector>

#include "pwiener/geometry.hpp"

namespace pwiener::kernels {

/// Weights of the quadratic form sum_e W_e (u_i - u_j)^2 on lattice edges.
/// wx[k] belongs to edge k -> k+1, wy[k] to edge k -> k+n.
struct EdgeWeights {
  std::vector<double> wx;
  std::vector<double> wy;
  std::vector<double> corner;  // scratch, 2^N values per cell
};

inline constexpr std::size_t reduction_block = 1024;

namespace serial {
double energy(const NodeGrid& grid, std::span<const double> u, double p);
/// d/da E(u + a d) at a = 0.
double energy_derivative(const NodeGrid& grid, std::span<const double> u, std::span<const double> d, double p);
/// W_e from corner weights max(|g_c|, floor)^(p-2).
void edge_weights(const NodeGrid& grid, std::span<const double> u, double p, double floor, EdgeWeights& out);
/// y = (mass I + L_W) x on free nodes, 0 on fixed nodes.
void apply(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
           std::span<const double> x, std::span<double> y);
/// Diagonal of mass I + L_W (1 on fixed nodes).
void diagonal(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
              std::span<double> diag);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace serial

namespace parallel {
double energy(const NodeGrid& grid, std::span<const double> u, double p);
double energy_derivative(const NodeGrid& grid, std::span<const double> u, std::span<const double> d, double p);
void edge_weights(const NodeGrid& grid, std::span<const double> u, double p, double floor, EdgeWeights& out);
void apply(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
           std::span<const double> x, std::span<double> y);
void diagonal(const NodeGrid& grid, const EdgeWeights& w, double mass, std::span<const std::uint8_t> fixed,
              std::span<double> diag);
double dot(std::span<const double> a, std::span<const double> b);
/// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);
}  // namespace parallel

}  // namespace pwiener::kernels
