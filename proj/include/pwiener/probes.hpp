#pragma once

#include <vector>

#include "pwiener/capacity.hpp"
#include "pwiener/pde.hpp"
#include "pwiener/wiener.hpp"

namespace pwiener {

struct HarnackProbeResult {
  Point y;
  double s = 0.0;
  double rho = 0.0;
  double c = 1.0;
  /// Mean of u(., s) over the nodes of K_rho(y).
  double avg = 0.0;
  /// min of u over nodes of K_{4 rho}(y) at the times of the window.
  double inf_later = 0.0;
  double theta = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double ratio = 0.0;
  /// theta came from the average rather than the distance to T.
  bool average_branch = false;
  /// s + 2 c^(p-2) avg^(2-p) rho^p < T, the smallness condition.
  bool smallness_holds = false;
  int window_samples = 0;
};

/// Node-based weak Harnack probe at time s (the nearest grid time). T is
/// the final time of the field.
HarnackProbeResult weak_harnack_probe(const SpaceTimeField& field, const Point& y, double s, double rho,
                                      const StructureParams& params);

struct SpreadingProbeResult {
  bool holds = false;
  /// Largest nu in (0, 1] for which the lower bound holds at every sample.
  double fitted_nu = 0.0;
  /// No sample constrained nu (fitted_nu is the cap 1).
  bool capped = false;
  int samples = 0;
};

/// Lower bound inf_{K_rho(y)} u(., t) >= k/2 (1 + (t - t_bar) / (nu k^(2-p) (2 rho)^p))^(1/(2-p))
/// checked at every grid time after t_bar.
SpreadingProbeResult spreading_probe(const SpaceTimeField& field, const Point& y, double rho, double t_bar, double k,
                                     const StructureParams& params);

struct FitPoint {
  double rho = 0.0;
  double osc = 0.0;
  double wiener_sum = 0.0;
  double log_osc = 0.0;
  double envelope = 0.0;
  bool within_envelope = false;
  /// osc minus the floor was not positive; left out of the fit.
  bool dropped = false;
};

struct FitReport {
  std::vector<FitPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
  int used = 0;
  bool fitted = false;
  bool all_within_envelope = true;
};

struct Measurement {
  double rho = 0.0;
  double osc = 0.0;
};

/// Least-squares fit of log(osc - osc_g) against W(rho) over the measured radii.
FitReport envelope_regression(const std::vector<Measurement>& measurements, const CapacityProfile& profile,
                              const EnvelopeParams& env);

}  // namespace pwiener
