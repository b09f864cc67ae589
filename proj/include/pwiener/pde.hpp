#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pwiener/geometry.hpp"
#include "pwiener/minimizer.hpp"

namespace pwiener {

/// Lattice over a box, the nodes of E carrying unknowns, and the time axis.
struct SpaceTimeGrid {
  NodeGrid space;
  /// 1 on unknown nodes: in E, off the box faces and, for lower-dimensional
  /// complements, at least h/2 away from them.
  std::vector<std::uint8_t> inside;
  /// 1 on nodes of E (analytic membership, box faces included).
  std::vector<std::uint8_t> in_domain;
  /// 0 <= t_0 < t_1 < ... < t_M = T; u(., t_0) = g(., t_0)
  std::vector<double> times;

  static SpaceTimeGrid make(const Cube& box, double h, const DomainSpec& domain, std::vector<double> times);

  int steps() const noexcept { return static_cast<int>(times.size()) - 1; }
  double final_time() const { return times.back(); }
};

std::vector<double> uniform_times(double T, int steps);
/// Steps tau = factor * omega^(2-p) h^p, the last one shortened to hit T.
std::vector<double> intrinsic_times(double T, double h, double p, double omega, double factor);
/// Steps growing geometrically from tau_min by `growth`, capped at tau_max.
std::vector<double> graded_times(double T, double tau_min, double tau_max, double growth);

struct BoundaryDatum {
  std::function<double(const Point&, double)> g;
  std::string kind = "custom";
  /// Free-text description of the modulus of continuity, for reports.
  std::string modulus;

  double operator()(const Point& x, double t) const { return g(x, t); }

  static BoundaryDatum constant(double c);
  /// c0 + c . x + ct t
  static BoundaryDatum linear(double c0, const std::vector<double>& c, double ct);
  /// min(1, dist(x, E^c) / width)
  static BoundaryDatum distance_ramp(const DomainSpec& domain, double width);
  /// Source-type solution t^(-N/l) [C - g_p (|x - x0| t^(-1/l))^(p/(p-1))]_+^((p-1)/(p-2)),
  /// l = N(p-2)+p, g_p = (p-2)/p l^(-1/(p-1)).
  static BoundaryDatum barenblatt(double p, int N, double C, const Point& x0);
};

double barenblatt_value(double p, int N, double C, double r, double t);

struct SchemeConfig {
  SolverConfig solver{200, 0.0, 1e-10, 1e-10, 20000, 1e-10};
};

struct SpaceTimeField {
  SpaceTimeGrid grid;
  double p = 3.0;
  /// values[k][node] at time grid.times[k]
  std::vector<std::vector<double>> values;
  /// Reweighting iterations per step (entry 0 unused).
  std::vector<int> iterations;

  std::span<const double> at(int k) const { return values.at(static_cast<std::size_t>(k)); }
};

/// Backward Euler for u_t = div(|Du|^(p-2) Du) with u = g on non-inside
/// nodes and u(., t_0) = g(., t_0). Each step minimises
///   h^N / (2 tau) sum (u - u_prev)^2 + E(u) / p.
SpaceTimeField solve(const SpaceTimeGrid& grid, const BoundaryDatum& datum, double p, const SchemeConfig& cfg);

/// Discrete energy E(u(., t_k)).
double field_energy(const SpaceTimeField& field, int k);

/// max - min of u over nodes of E in K_{2 rho}(x_o) x [max(0, t_o - omega^(2-p) rho^p), t_o].
double oscillation(const SpaceTimeField& field, const Point& x_o, double t_o, double rho, double omega_o, double p);

/// max - min of g over lateral nodes (non-inside nodes next to an inside
/// node) in K_{2 R_o}(x_o), at `samples` evenly spaced times of
/// [max(0, t_o - time_depth), t_o].
double osc_g_on_lateral(const SpaceTimeGrid& grid, const BoundaryDatum& datum, const Point& x_o, double t_o,
                        double R_o, double time_depth, int samples = 33);

/// min / max of the data on the parabolic boundary: u(., t_0) and the
/// non-inside nodes at every time.
std::pair<double, double> parabolic_boundary_range(const SpaceTimeGrid& grid, const BoundaryDatum& datum);

}  // namespace pwiener
