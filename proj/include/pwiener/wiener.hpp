#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "pwiener/capacity.hpp"
#include "pwiener/geometry.hpp"

namespace pwiener {

struct ProfileEntry {
  int i = 0;
  double rho = 0.0;
  double delta = 0.0;
  /// delta^(1/(p-1))
  double A = 0.0;
  double cap_obstacle = 0.0;
  double cap_full = 0.0;
  int iterations = 0;
};

/// Relative capacities sampled on rho_i = c_bar^i R_o, i = 0 .. depth-1.
struct CapacityProfile {
  double R_o = 1.0;
  double c_bar = 0.5;
  double p = 3.0;
  std::vector<ProfileEntry> entries;

  static CapacityProfile from_deltas(double R_o, double c_bar, double p, const std::vector<double>& deltas);
  /// Stores A exactly and sets delta = A^(p-1).
  static CapacityProfile from_amplitudes(double R_o, double c_bar, double p, const std::vector<double>& amplitudes);

  int depth() const noexcept { return static_cast<int>(entries.size()); }
  double amplitude(int i) const { return entries.at(static_cast<std::size_t>(i)).A; }
  double radius(int i) const { return entries.at(static_cast<std::size_t>(i)).rho; }
  void validate() const;
};

/// Radii are solved concurrently (one OpenMP task per radius).
CapacityProfile build_profile(const DomainSpec& domain, const Point& x_o, double R_o, double c_bar, int depth,
                              const StructureParams& params, const CapacityConfig& cfg);

/// ln(1/c_bar) * sum_{i = i_lo}^{i_hi} A_i; 0 for an empty range.
double wiener_sum(const CapacityProfile& profile, int i_lo, int i_hi);

/// Quadrature of int_rho^{R_o} A(s) ds/s with A piecewise constant on the
/// geometric grid: A_k on (rho_{k+1}, rho_k]. Exact for constant profiles.
/// Requires c_bar^depth R_o <= rho <= R_o.
double wiener_integral(const CapacityProfile& profile, double rho);

enum class WienerVerdict { diverging, converging, inconclusive };
std::string_view to_string(WienerVerdict v);

struct WienerDiagnostic {
  WienerVerdict verdict = WienerVerdict::inconclusive;
  /// Least-squares slope of ln A_i against i over the tail window.
  double tail_slope = 0.0;
  double max_ratio = 0.0;
  int window = 0;
  /// Always true: a finite sample cannot decide divergence.
  bool heuristic = true;
};

struct WienerTestOptions {
  /// Slopes >= -slope_tol count as A bounded below.
  double slope_tol = 0.05;
  /// Converging needs exp(slope) <= 1 - ratio_margin and every ratio < 1.
  double ratio_margin = 0.1;
};

WienerDiagnostic is_wiener_point(const CapacityProfile& profile, int window, const WienerTestOptions& opt = {});

struct RealizedScale {
  double R_o = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  /// 3 gamma_star delta^((2-p)/(p-1)) R_o^(p-eps), the depth of Q_{R_o}.
  double time_depth = 0.0;
  int level = 0;
};

/// Largest R = R_max 2^-k, k = 0 .. levels-1, with time_depth(R) <= t_o.
RealizedScale realize_R_o_epsilon(double t_o, const std::function<double(double)>& delta_at,
                                  const StructureParams& params, double epsilon, double R_max, int levels);
RealizedScale realize_R_o_epsilon(double t_o, const DomainSpec& domain, const Point& x_o,
                                  const StructureParams& params, double epsilon, double R_max, int levels,
                                  const CapacityConfig& cfg);

struct CBarChoice {
  int lambda = 1;
  double c_bar = 0.5;
};

/// 2^(lambda p / (p-2) - 1) >= 3^(1/(p-2)) / (1 - 1/gamma_2)
bool c_bar_inequality_holds(int lambda, double p, double gamma_2);
/// Smallest lambda >= 1 satisfying the inequality; c_bar = 2^-lambda.
CBarChoice choose_c_bar(const StructureParams& params);

struct Subsequence {
  std::vector<int> indices;
  /// Indices remain after the last pick but none qualifies.
  bool truncated = false;
  int truncated_at = -1;
};

/// i_0 = 0, then the smallest i > i_j with A_i > A_{i_j} 2^-(i - i_j).
Subsequence build_subsequence(const CapacityProfile& profile, const StructureParams& params);

struct CascadeCylinder {
  int j = 0;
  /// i_{j-1}
  int base_index = 0;
  double half_edge = 0.0;
  double time_depth = 0.0;
  double theta_bar = 0.0;
};

struct CascadeCheck {
  int j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct EnvelopePoint {
  double rho = 0.0;
  double wiener_sum = 0.0;
  /// mu_o exp(-W / gamma_3), plus the power-law term on that branch.
  double bound = 0.0;
  /// mu_{i_{l+1}} for rho_{i_{l+1}} <= rho < rho_{i_l}; 0 when not reached.
  double cascade_level = 0.0;
  bool power_law_branch = false;
};

struct CascadeReport {
  Subsequence subsequence;
  int lambda = 0;
  double c_bar = 0.0;
  double mu_o = 0.0;
  double epsilon = 0.0;
  /// mu_{i_0}, ..., mu_{i_last}, then the level reached on the last cylinder.
  std::vector<double> mu_seq;
  std::vector<CascadeCylinder> cylinders;
  std::vector<CascadeCheck> bar_c;
  std::vector<CascadeCheck> sub_bd;
  std::vector<CascadeCheck> bound_chain;
  bool in_req_holds = true;
  bool power_law_branch = false;
  double power_law_bound = 0.0;
  bool bar_c_all = true;
  bool sub_bd_all = true;
  bool bound_chain_all = true;
  std::vector<EnvelopePoint> envelope_at;
};

/// The induction along the capacity-selected subsequence. A non-positive
/// epsilon skips the initial scale requirement.
CascadeReport oscillation_cascade(double mu_o, const CapacityProfile& profile, const StructureParams& params,
                                  double epsilon = 0.0);

struct EnvelopeParams {
  double omega_o = 1.0;
  double osc_g = 0.0;
  double epsilon = 0.5;
  double R_o = 1.0;
  StructureParams params;
};

/// omega_o exp(-gamma W(rho)) + osc_g + bar_gamma R_o^(eps/(p-2)), 0 < rho < R_o.
double decay_envelope(const EnvelopeParams& env, const CapacityProfile& profile, double rho);

/// gamma * gamma_o^(1/(p-1))
double holder_exponent(double gamma_o, const StructureParams& params);

}  // namespace pwiener
