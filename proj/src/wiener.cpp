#include "pwiener/wiener.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <string>

#include "pwiener/errors.hpp"

namespace pwiener {

namespace {

constexpr double rel_tol = 1e-12;

bool le_tol(double a, double b) { return a <= b + rel_tol * std::max(std::abs(a), std::abs(b)); }

CapacityProfile empty_profile(double R_o, double c_bar, double p) {
  if (!(R_o > 0.0)) throw InvalidArgument("profile: R_o must be positive");
  if (!(c_bar > 0.0 && c_bar < 1.0)) throw InvalidArgument("profile: c_bar must lie in (0, 1)");
  if (!(p > 2.0)) throw InvalidArgument("profile: p must exceed 2");
  CapacityProfile pr;
  pr.R_o = R_o;
  pr.c_bar = c_bar;
  pr.p = p;
  return pr;
}

}  // namespace

CapacityProfile CapacityProfile::from_deltas(double R_o, double c_bar, double p, const std::vector<double>& deltas) {
  CapacityProfile pr = empty_profile(R_o, c_bar, p);
  double rho = R_o;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("profile: delta must lie in [0, 1]");
    ProfileEntry e;
    e.i = static_cast<int>(i);
    e.rho = rho;
    e.delta = d;
    e.A = std::pow(d, 1.0 / (p - 1.0));
    pr.entries.push_back(e);
    rho *= c_bar;
  }
  return pr;
}

CapacityProfile CapacityProfile::from_amplitudes(double R_o, double c_bar, double p,
                                                 const std::vector<double>& amplitudes) {
  CapacityProfile pr = empty_profile(R_o, c_bar, p);
  double rho = R_o;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double a = amplitudes[i];
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("profile: amplitude must lie in [0, 1]");
    ProfileEntry e;
    e.i = static_cast<int>(i);
    e.rho = rho;
    e.A = a;
    e.delta = std::pow(a, p - 1.0);
    pr.entries.push_back(e);
    rho *= c_bar;
  }
  return pr;
}

void CapacityProfile::validate() const {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.i != static_cast<int>(k)) throw InvalidArgument("profile: indices must be contiguous from 0");
    if (k > 0 && !(e.rho < entries[k - 1].rho)) throw InvalidArgument("profile: radii must decrease");
    if (!(e.delta >= 0.0 && e.delta <= 1.0)) throw InvalidArgument("profile: delta outside [0, 1]");
    if (std::abs(e.A - std::pow(e.delta, 1.0 / (p - 1.0))) > 1e-12) {
      throw InvalidArgument("profile: A inconsistent with delta");
    }
  }
}

CapacityProfile build_profile(const DomainSpec& domain, const Point& x_o, double R_o, double c_bar, int depth,
                              const StructureParams& params, const CapacityConfig& cfg) {
  if (depth < 1) throw InvalidArgument("build_profile: depth must be at least 1");
  if (domain.kind() == DomainKind::full_space) {
    throw InvalidArgument("build_profile: full_space has no boundary point");
  }
  if (!domain.is_boundary_point(x_o)) throw InvalidArgument("build_profile: x_o is not a boundary point of E");
  params.validate();
  CapacityProfile pr = empty_profile(R_o, c_bar, params.p);
  pr.entries.resize(static_cast<std::size_t>(depth));
  double rho = R_o;
  for (int i = 0; i < depth; ++i) {
    pr.entries[static_cast<std::size_t>(i)].i = i;
    pr.entries[static_cast<std::size_t>(i)].rho = rho;
    rho *= c_bar;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < depth; ++i) {
    auto& e = pr.entries[static_cast<std::size_t>(i)];
    try {
      const DeltaValue d = delta(domain, x_o, e.rho, params, cfg);
      e.delta = d.delta;
      e.A = std::pow(d.delta, 1.0 / (params.p - 1.0));
      e.cap_obstacle = d.cap_obstacle;
      e.cap_full = d.cap_full;
      e.iterations = d.iterations;
    } catch (...) {
#pragma omp critical(pwiener_profile_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return pr;
}

double wiener_sum(const CapacityProfile& profile, int i_lo, int i_hi) {
  if (i_lo > i_hi) return 0.0;
  if (i_lo < 0 || i_hi >= profile.depth()) throw InvalidArgument("wiener_sum: index range outside the profile");
  double s = 0.0;
  for (int i = i_lo; i <= i_hi; ++i) s += profile.amplitude(i);
  return std::log(1.0 / profile.c_bar) * s;
}

double wiener_integral(const CapacityProfile& profile, double rho) {
  if (!(rho > 0.0) || rho > profile.R_o) throw InvalidArgument("wiener_integral: rho must lie in (0, R_o]");
  const double lc = std::log(1.0 / profile.c_bar);
  double full = 0.0;
  for (int k = 0; k < profile.depth(); ++k) {
    const double top = profile.radius(k);
    const double bottom = top * profile.c_bar;
    if (rho > bottom || (rho == bottom && k + 1 == profile.depth())) {
      return lc * full + profile.amplitude(k) * std::log(top / rho);
    }
    full += profile.amplitude(k);
  }
  throw InvalidArgument("wiener_integral: rho below the radii covered by the profile");
}

std::string_view to_string(WienerVerdict v) {
  switch (v) {
    case WienerVerdict::diverging:
      return "diverging";
    case WienerVerdict::converging:
      return "converging";
    case WienerVerdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

WienerDiagnostic is_wiener_point(const CapacityProfile& profile, int window, const WienerTestOptions& opt) {
  if (profile.depth() < 4) throw InvalidArgument("is_wiener_point: need at least 4 radii");
  WienerDiagnostic d;
  const int w = std::clamp(window, 3, profile.depth());
  d.window = w;
  const int first = profile.depth() - w;
  for (int i = first; i < profile.depth(); ++i) {
    if (!(profile.amplitude(i) > 0.0)) {
      // A vanishes on the tail: nothing left to sum.
      d.verdict = WienerVerdict::converging;
      d.tail_slope = -INFINITY;
      return d;
    }
  }
  double sx = 0.0, sy = 0.0;
  for (int i = first; i < profile.depth(); ++i) {
    sx += i;
    sy += std::log(profile.amplitude(i));
  }
  const double mx = sx / w, my = sy / w;
  double sxy = 0.0, sxx = 0.0;
  for (int i = first; i < profile.depth(); ++i) {
    sxy += (i - mx) * (std::log(profile.amplitude(i)) - my);
    sxx += (i - mx) * (i - mx);
  }
  d.tail_slope = sxy / sxx;
  for (int i = first + 1; i < profile.depth(); ++i) {
    d.max_ratio = std::max(d.max_ratio, profile.amplitude(i) / profile.amplitude(i - 1));
  }
  if (d.tail_slope >= -opt.slope_tol) {
    d.verdict = WienerVerdict::diverging;
  } else if (std::exp(d.tail_slope) <= 1.0 - opt.ratio_margin && d.max_ratio < 1.0) {
    d.verdict = WienerVerdict::converging;
  }
  return d;
}

RealizedScale realize_R_o_epsilon(double t_o, const std::function<double(double)>& delta_at,
                                  const StructureParams& params, double epsilon, double R_max, int levels) {
  if (!(t_o > 0.0)) throw InvalidArgument("realize_R_o_epsilon: t_o must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("realize_R_o_epsilon: epsilon must lie in (0, 1)");
  if (!(R_max > 0.0) || levels < 1) throw InvalidArgument("realize_R_o_epsilon: bad search range");
  const double p = params.p;
  double R = R_max;
  double last_depth = INFINITY;
  for (int k = 0; k < levels; ++k, R *= 0.5) {
    const double d = delta_at(R);
    if (!(d > 0.0)) continue;  // (2-p)/(p-1) < 0: infinite depth
    const double depth =
        3.0 * params.constants.gamma_star * std::pow(d, (2.0 - p) / (p - 1.0)) * std::pow(R, p - epsilon);
    last_depth = depth;
    if (depth <= t_o) return {R, epsilon, d, depth, k};
  }
  throw NumericError("realize_R_o_epsilon: no admissible R_o in [" + std::to_string(R_max * std::ldexp(1.0, 1 - levels)) +
                     ", " + std::to_string(R_max) + "] (smallest depth " + std::to_string(last_depth) +
                     " > t_o); try a smaller epsilon or a wider search range");
}

RealizedScale realize_R_o_epsilon(double t_o, const DomainSpec& domain, const Point& x_o,
                                  const StructureParams& params, double epsilon, double R_max, int levels,
                                  const CapacityConfig& cfg) {
  return realize_R_o_epsilon(
      t_o, [&](double R) { return delta(domain, x_o, R, params, cfg).delta; }, params, epsilon, R_max, levels);
}

bool c_bar_inequality_holds(int lambda, double p, double gamma_2) {
  const double lhs = std::pow(2.0, lambda * p / (p - 2.0) - 1.0);
  const double rhs = std::pow(3.0, 1.0 / (p - 2.0)) / (1.0 - 1.0 / gamma_2);
  return lhs >= rhs;
}

CBarChoice choose_c_bar(const StructureParams& params) {
  if (!(params.p > 2.0)) throw InvalidArgument("choose_c_bar: p must exceed 2");
  if (!(params.constants.gamma_2 > 1.0)) throw InvalidArgument("choose_c_bar: gamma_2 must exceed 1");
  for (int lambda = 1; lambda < 1024; ++lambda) {
    if (c_bar_inequality_holds(lambda, params.p, params.constants.gamma_2)) {
      return {lambda, std::ldexp(1.0, -lambda)};
    }
  }
  throw NumericError("choose_c_bar: no lambda below 1024 satisfies the inequality");
}

Subsequence build_subsequence(const CapacityProfile& profile, const StructureParams&) {
  if (profile.depth() == 0) throw InvalidArgument("build_subsequence: empty profile");
  for (const auto& e : profile.entries) {
    if (!(e.A > 0.0)) {
      throw NumericError("build_subsequence: A vanishes at index " + std::to_string(e.i) +
                            " (divergence hypothesis violated)");
    }
  }
  Subsequence s;
  s.indices.push_back(0);
  int cur = 0;
  while (cur + 1 < profile.depth()) {
    int next = -1;
    for (int i = cur + 1; i < profile.depth(); ++i) {
      if (profile.amplitude(i) > std::ldexp(profile.amplitude(cur), -(i - cur))) {
        next = i;
        break;
      }
    }
    if (next < 0) {
      s.truncated = true;
      s.truncated_at = cur;
      break;
    }
    s.indices.push_back(next);
    cur = next;
  }
  return s;
}

CascadeReport oscillation_cascade(double mu_o, const CapacityProfile& profile, const StructureParams& params,
                                  double epsilon) {
  if (!(mu_o > 0.0)) throw InvalidArgument("oscillation_cascade: mu_o must be positive");
  const double p = params.p;
  const auto& c = params.constants;
  CascadeReport r;
  r.subsequence = build_subsequence(profile, params);
  r.lambda = choose_c_bar(params).lambda;
  r.c_bar = profile.c_bar;
  r.mu_o = mu_o;
  r.epsilon = epsilon;
  const auto& idx = r.subsequence.indices;
  for (int i : idx) {
    if (profile.amplitude(i) >= c.gamma_2) {
      throw NumericError("oscillation_cascade: A at index " + std::to_string(i) + " reaches gamma_2");
    }
  }

  const double R_o = profile.R_o;
  if (epsilon > 0.0) {
    r.in_req_holds = std::pow(mu_o, 2.0 - p) * std::pow(R_o, p) <= std::pow(R_o, p - epsilon);
    if (!r.in_req_holds) {
      r.power_law_branch = true;
      r.power_law_bound = std::pow(R_o, epsilon / (p - 2.0));
    }
  }

  r.mu_seq.push_back(mu_o);
  if (!r.power_law_branch) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const double A = profile.amplitude(idx[j]);
      const double rho = profile.radius(idx[j]);
      const double mu = r.mu_seq[j];
      CascadeCylinder cyl;
      cyl.j = static_cast<int>(j) + 1;
      cyl.base_index = idx[j];
      cyl.theta_bar = std::pow(mu * A, 2.0 - p);
      cyl.half_edge = 2.0 * rho;
      cyl.time_depth = c.gamma_star * cyl.theta_bar * std::pow(rho, p);
      r.cylinders.push_back(cyl);
      r.mu_seq.push_back(mu * (1.0 - A / c.gamma_2));
    }

    // Nesting of consecutive intrinsic cylinders.
    for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
      const double Aj = profile.amplitude(idx[j]), An = profile.amplitude(idx[j + 1]);
      CascadeCheck ck;
      ck.j = static_cast<int>(j);
      ck.lhs = 3.0 * std::pow(r.mu_seq[j + 1] * An, 2.0 - p) * std::pow(profile.radius(idx[j + 1]), p);
      ck.rhs = std::pow(r.mu_seq[j] * Aj, 2.0 - p) * std::pow(profile.radius(idx[j]), p);
      ck.holds = le_tol(ck.lhs, ck.rhs);
      r.bar_c_all = r.bar_c_all && ck.holds;
      r.bar_c.push_back(ck);
    }

    // Prefix sums up to the next pick; the last block runs to the end of the profile.
    double picked = 0.0;
    double prefix = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      picked += profile.amplitude(idx[k]);
      const int stop = k + 1 < idx.size() ? idx[k + 1] : profile.depth();
      for (int i = idx[k]; i < stop; ++i) prefix += profile.amplitude(i);
      CascadeCheck ck;
      ck.j = static_cast<int>(k);
      ck.lhs = prefix;
      ck.rhs = 2.0 * picked;
      ck.holds = le_tol(ck.lhs, ck.rhs);
      r.sub_bd_all = r.sub_bd_all && ck.holds;
      r.sub_bd.push_back(ck);
    }

    // mu_{i_{l+1}} <= mu_o exp(-sum_j A_{i_j} / gamma_2) <= mu_o exp(-sum_i A_i / (2 gamma_2)).
    picked = 0.0;
    prefix = 0.0;
    for (std::size_t l = 0; l < idx.size(); ++l) {
      picked += profile.amplitude(idx[l]);
      const int stop = l + 1 < idx.size() ? idx[l + 1] : profile.depth();
      for (int i = idx[l]; i < stop; ++i) prefix += profile.amplitude(i);
      const double mid = mu_o * std::exp(-picked / c.gamma_2);
      const double outer = mu_o * std::exp(-prefix / (2.0 * c.gamma_2));
      CascadeCheck ck;
      ck.j = static_cast<int>(l);
      ck.lhs = r.mu_seq[l + 1];
      ck.rhs = outer;
      ck.holds = le_tol(r.mu_seq[l + 1], mid) && le_tol(mid, outer);
      r.bound_chain_all = r.bound_chain_all && ck.holds;
      r.bound_chain.push_back(ck);
    }
  }

  const double tail = r.power_law_branch ? r.power_law_bound : 0.0;
  for (int i = 1; i < profile.depth(); ++i) {
    EnvelopePoint e;
    e.rho = profile.radius(i);
    e.wiener_sum = wiener_integral(profile, e.rho);
    e.bound = mu_o * std::exp(-e.wiener_sum / c.gamma_3) + tail;
    e.power_law_branch = r.power_law_branch;
    if (!r.power_law_branch) {
      // l with rho_{i_{l+1}} <= rho < rho_{i_l}
      for (std::size_t l = 0; l + 1 < idx.size(); ++l) {
        if (idx[l] < i && i <= idx[l + 1]) {
          e.cascade_level = r.mu_seq[l + 1];
          break;
        }
      }
    }
    r.envelope_at.push_back(e);
  }
  return r;
}

double decay_envelope(const EnvelopeParams& env, const CapacityProfile& profile, double rho) {
  if (!(rho > 0.0) || rho >= env.R_o) throw InvalidArgument("decay_envelope: rho must lie in (0, R_o)");
  const double p = env.params.p;
  const double W = wiener_integral(profile, rho);
  return env.omega_o * std::exp(-env.params.constants.gamma * W) + env.osc_g +
         env.params.constants.bar_gamma * std::pow(env.R_o, env.epsilon / (p - 2.0));
}

double holder_exponent(double gamma_o, const StructureParams& params) {
  if (!(gamma_o > 0.0 && gamma_o <= 1.0)) throw InvalidArgument("holder_exponent: gamma_o must lie in (0, 1]");
  return params.constants.gamma * std::pow(gamma_o, 1.0 / (params.p - 1.0));
}

}  // namespace pwiener
