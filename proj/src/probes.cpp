#include "pwiener/probes.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pwiener/errors.hpp"

namespace pwiener {

namespace {

int nearest_time(const SpaceTimeGrid& g, double t) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(g.times.size()); ++k) {
    if (std::abs(g.times[static_cast<std::size_t>(k)] - t) < std::abs(g.times[static_cast<std::size_t>(best)] - t)) {
      best = k;
    }
  }
  return best;
}

std::vector<std::size_t> nodes_in(const NodeGrid& grid, const Cube& cube) {
  std::vector<std::size_t> out;
  const double tol = 1e-9 * grid.h;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (cube.contains(grid.node(k), tol)) out.push_back(k);
  }
  return out;
}

void require_inside_box(const NodeGrid& grid, const Cube& cube, const char* what) {
  const Cube box = grid.box();
  const double tol = 1e-9 * grid.h;
  for (int a = 0; a < grid.dim; ++a) {
    if (cube.center[a] - cube.half_edge < box.center[a] - box.half_edge - tol ||
        cube.center[a] + cube.half_edge > box.center[a] + box.half_edge + tol) {
      throw InvalidArgument(std::string(what) + ": probe cube leaves the grid");
    }
  }
}

}  // namespace

HarnackProbeResult weak_harnack_probe(const SpaceTimeField& field, const Point& y, double s, double rho,
                                      const StructureParams& params) {
  if (!(rho > 0.0)) throw InvalidArgument("weak_harnack_probe: rho must be positive");
  const auto& g = field.grid;
  const double p = params.p;
  const double c = params.constants.harnack_c;
  const Cube big(y, 4.0 * rho);
  require_inside_box(g.space, big, "weak_harnack_probe");

  HarnackProbeResult r;
  r.y = y;
  r.rho = rho;
  r.c = c;
  const int ks = nearest_time(g, s);
  r.s = g.times[static_cast<std::size_t>(ks)];
  const double T = g.final_time();

  const auto small_nodes = nodes_in(g.space, Cube(y, rho));
  const auto big_nodes = nodes_in(g.space, big);
  const auto us = field.at(ks);
  double sum = 0.0;
  for (std::size_t k : small_nodes) {
    if (us[k] < 0.0) throw InvalidArgument("weak_harnack_probe: negative value at node " + std::to_string(k));
    sum += us[k];
  }
  r.avg = sum / static_cast<double>(small_nodes.size());

  const double by_time = std::pow(c, 2.0 - p) * (T - r.s) / std::pow(rho, p);
  const double by_avg = r.avg > 0.0 ? std::pow(r.avg, 2.0 - p) : std::numeric_limits<double>::infinity();
  r.theta = std::min(by_time, by_avg);
  r.average_branch = by_avg <= by_time;
  r.smallness_holds = r.avg > 0.0 && r.s + 2.0 * std::pow(c, p - 2.0) * by_avg * std::pow(rho, p) < T;
  r.t_lo = r.s + 0.5 * r.theta * std::pow(rho, p);
  r.t_hi = r.s + r.theta * std::pow(rho, p);

  const double slack = 1e-12 * std::max(1.0, T);
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < g.times.size(); ++m) {
    if (g.times[m] < r.t_lo - slack || g.times[m] > r.t_hi + slack) continue;
    ++r.window_samples;
    const auto u = field.at(static_cast<int>(m));
    for (std::size_t k : big_nodes) {
      if (u[k] < 0.0) throw InvalidArgument("weak_harnack_probe: negative value at node " + std::to_string(k));
      inf = std::min(inf, u[k]);
    }
  }
  if (r.window_samples == 0) throw InvalidArgument("weak_harnack_probe: no grid time in the probe window");
  r.inf_later = inf;
  r.ratio = inf > 0.0 ? r.avg / inf : std::numeric_limits<double>::infinity();
  return r;
}

SpreadingProbeResult spreading_probe(const SpaceTimeField& field, const Point& y, double rho, double t_bar, double k,
                                     const StructureParams& params) {
  if (!(k > 0.0) || !(rho > 0.0)) throw InvalidArgument("spreading_probe: k and rho must be positive");
  const auto& g = field.grid;
  const double p = params.p;
  require_inside_box(g.space, Cube(y, 2.0 * rho), "spreading_probe");
  const int kb = nearest_time(g, t_bar);
  const double tb = g.times[static_cast<std::size_t>(kb)];

  const auto u0 = field.at(kb);
  for (std::size_t n : nodes_in(g.space, Cube(y, 2.0 * rho))) {
    if (u0[n] < k) {
      const Point x = g.space.node(n);
      throw InvalidArgument("spreading_probe: u(., t_bar) = " + std::to_string(u0[n]) + " < k at node (" +
                            std::to_string(x[0]) + (g.space.dim == 2 ? ", " + std::to_string(x[1]) : "") + ")");
    }
  }

  SpreadingProbeResult r;
  r.fitted_nu = 1.0;
  r.capped = true;
  const auto inner = nodes_in(g.space, Cube(y, rho));
  const double scale = std::pow(k, 2.0 - p) * std::pow(2.0 * rho, p);
  for (std::size_t m = static_cast<std::size_t>(kb) + 1; m < g.times.size(); ++m) {
    ++r.samples;
    const auto u = field.at(static_cast<int>(m));
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t n : inner) inf = std::min(inf, u[n]);
    const double q = 2.0 * inf / k;
    if (q >= 1.0) continue;  // bound <= k/2 holds for every nu
    if (q <= 0.0) {
      r.fitted_nu = 0.0;
      r.capped = false;
      break;
    }
    // (1 + dt / (nu scale))^(1/(2-p)) <= q  <=>  nu <= dt / (scale (q^(2-p) - 1))
    const double nu = (g.times[m] - tb) / (scale * (std::pow(q, 2.0 - p) - 1.0));
    if (nu < r.fitted_nu) {
      r.fitted_nu = nu;
      r.capped = false;
    }
  }
  r.holds = r.fitted_nu > 0.0;
  return r;
}

FitReport envelope_regression(const std::vector<Measurement>& measurements, const CapacityProfile& profile,
                              const EnvelopeParams& env) {
  if (measurements.size() < 3) throw InvalidArgument("envelope_regression: need at least 3 radii");
  FitReport f;
  double sx = 0.0, sy = 0.0;
  for (const auto& m : measurements) {
    FitPoint pt;
    pt.rho = m.rho;
    pt.osc = m.osc;
    pt.wiener_sum = wiener_integral(profile, m.rho);
    pt.envelope = decay_envelope(env, profile, m.rho);
    pt.within_envelope = m.osc <= pt.envelope;
    f.all_within_envelope = f.all_within_envelope && pt.within_envelope;
    const double v = m.osc - env.osc_g;
    if (v > 0.0) {
      pt.log_osc = std::log(v);
      sx += pt.wiener_sum;
      sy += pt.log_osc;
      ++f.used;
    } else {
      pt.dropped = true;
      pt.log_osc = std::numeric_limits<double>::quiet_NaN();
    }
    f.points.push_back(pt);
  }
  if (f.used < 3) return f;
  const double mx = sx / f.used, my = sy / f.used;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& pt : f.points) {
    if (pt.dropped) continue;
    const double dx = pt.wiener_sum - mx, dy = pt.log_osc - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) return f;
  f.fitted = true;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return f;
}

}  // namespace pwiener
