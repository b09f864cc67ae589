#pragma once

#include <vector>

#include "pwiener/geometry.hpp"
#include "pwiener/minimizer.hpp"

namespace pwiener {

/// The named constants of the regularity estimate. None of them has a known
/// value; they are parameters of the toolkit and every report echoes them.
struct StructureConstants {
  double gamma = 0.5;
  double bar_gamma = 1.0;
  double gamma_1 = 2.0;
  double gamma_2 = 2.0;
  double gamma_star = 2.0;
  double gamma_3 = 2.0;
  double nu = 0.5;
  /// Constant c of the weak Harnack time scale.
  double harnack_c = 1.0;
};

struct StructureParams {
  double p = 3.0;
  int N = 2;
  StructureConstants constants;

  /// Default family for a given c_bar:
  ///   gamma_1 = gamma_2 = 2, gamma_star = gamma_1^(p-2),
  ///   gamma_3 = 2 gamma_2 ln(1/c_bar), gamma = 1 / gamma_3, bar_gamma = 1.
  static StructureParams defaults(double p, int N, double c_bar);
  /// Recompute gamma_star, gamma_3 and gamma from gamma_1, gamma_2, c_bar.
  void derive(double c_bar);
  /// Throws InvalidArgument on p <= 2, N outside {1, 2} or bad constants.
  void validate() const;
};

struct CondenserProblem {
  IndicatorField obstacle;
  Cube outer;
  double p = 3.0;
  SolverConfig solver;
};

struct CapacityValue {
  double value = 0.0;
  /// Discrete energy after every accepted iterate (nonincreasing).
  std::vector<double> energy_history;
  double grid_h = 0.0;
  int iterations = 0;
  /// Largest |psi| of the minimiser.
  double max_abs = 0.0;
};

/// Discrete p-capacity of the obstacle nodes relative to the outer cube:
/// minimum of the discrete energy over grid functions equal to 1 on the
/// obstacle and 0 on the faces of `outer`. The obstacle lattice must share
/// the spacing of the outer lattice and sit on it.
CapacityValue solve_condenser(const CondenserProblem& problem);

struct CapacityConfig {
  /// Lattice cells per radius: h = rho / cells_per_radius (even, >= 8).
  int cells_per_radius = 16;
  SolverConfig solver;
};

struct DeltaValue {
  double delta = 0.0;
  double cap_obstacle = 0.0;
  double cap_full = 0.0;
  int iterations = 0;
  double grid_h = 0.0;
};

/// cap(K_rho(x_o) \ E, K_{3rho/2}(x_o)) / cap(K_rho(x_o), K_{3rho/2}(x_o)).
DeltaValue delta(const DomainSpec& domain, const Point& x_o, double rho, const StructureParams& params,
                 const CapacityConfig& cfg);

struct TimeSlice {
  double tau = 0.0;
  IndicatorField obstacle;
};

/// Trapezoid rule in tau of the slice capacities relative to `outer`.
/// Slices must be ordered with uniform spacing.
double parabolic_capacity(const std::vector<TimeSlice>& slices, const Cube& outer, double p,
                          const SolverConfig& cfg);

}  // namespace pwiener
