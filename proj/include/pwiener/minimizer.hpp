#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pwiener/geometry.hpp"

namespace pwiener {

/// Iteration controls shared by the condenser solver and the time stepper.
struct SolverConfig {
  int max_iter = 500;
  /// Stop when (J_old - J_new) / J_new falls below this (0 disables).
  double tol_rel_energy = 1e-8;
  /// Stop when the largest nodal update falls below this (0 disables).
  double step_tol = 0.0;
  /// Gradients below this are lifted to it before forming |g|^(p-2).
  double weight_floor = 1e-10;
  int cg_max_iter = 20000;
  double cg_rel_tol = 1e-10;
};

/// Minimise
///
///   J(u) = mass/2 * sum_free (u - previous)^2 + E(u) / p
///
/// over nodal functions with the values of `initial` kept on fixed nodes.
/// With mass = 0 this is the discrete p-Dirichlet problem; with
/// mass = h^N / tau it is one backward-Euler step of u_t = div(|Du|^(p-2) Du).
struct ReweightedProblem {
  NodeGrid grid;
  std::span<const std::uint8_t> fixed;
  double p = 3.0;
  double mass = 0.0;
  std::span<const double> previous;
  /// Truncation bounds; iterates are clamped into [lower, upper], which
  /// never increases J when fixed values and `previous` lie inside.
  double lower = 0.0;
  double upper = 1.0;
};

struct MinimizerResult {
  std::vector<double> u;
  /// J after every accepted iterate, starting with J(initial).
  std::vector<double> objective_history;
  /// E(u) of the returned iterate.
  double energy = 0.0;
  int iterations = 0;
  long linear_iterations = 0;
};

/// Reweighted (Kacanov) iteration: each step solves the linear problem
/// with weights max(|g_c|, floor)^(p-2) frozen at the current iterate by
/// Jacobi-preconditioned CG, then takes an exact line search on J along
/// the resulting direction, then truncates. J is nonincreasing.
/// `laplace_start` uses unit weights for the first step.
/// Throws ConvergenceError when max_iter is reached.
MinimizerResult minimize_reweighted(const ReweightedProblem& problem, std::vector<double> initial,
                                    const SolverConfig& cfg, bool laplace_start);

/// J(u) for the problem above.
double reweighted_objective(const ReweightedProblem& problem, std::span<const double> u);

}  // namespace pwiener
