#include "pwiener/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pwiener/errors.hpp"
#include "pwiener/kernels.hpp"

namespace pwiener {

SpaceTimeGrid SpaceTimeGrid::make(const Cube& box, double h, const DomainSpec& domain, std::vector<double> times) {
  if (box.dim() != domain.dim()) throw InvalidArgument("space-time grid: box and domain dimensions differ");
  if (times.size() < 2 || !(times.front() >= 0.0)) {
    throw InvalidArgument("space-time grid: need at least two times, starting at t >= 0");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw InvalidArgument("space-time grid: times must increase");
  }
  SpaceTimeGrid g;
  g.space = NodeGrid::over(box, h);
  g.times = std::move(times);
  const std::size_t n = g.space.size();
  g.inside.assign(n, 0);
  g.in_domain.assign(n, 0);
  const bool thin = domain.lower_dimensional();
  for (std::size_t k = 0; k < n; ++k) {
    const Point x = g.space.node(k);
    const bool in = domain.contains(x);
    g.in_domain[k] = in ? 1 : 0;
    bool unknown = in && !g.space.on_face(k);
    if (unknown && thin) unknown = domain.distance_to_complement(x) >= 0.5 * h;
    g.inside[k] = unknown ? 1 : 0;
  }
  // An unknown node whose neighbours are all Dirichlet nodes is decoupled
  // from the rest of E at this resolution.
  const int nn = g.space.n;
  for (std::size_t k = 0; k < n; ++k) {
    if (!g.inside[k]) continue;
    const auto [i, j] = g.space.multi_index(k);
    bool linked = g.inside[g.space.index(i - 1, j)] || g.inside[g.space.index(i + 1, j)];
    if (g.space.dim == 2) linked = linked || g.inside[k - static_cast<std::size_t>(nn)] || g.inside[k + static_cast<std::size_t>(nn)];
    if (!linked) {
      const Point x = g.space.node(k);
      throw InvalidArgument("space-time grid: isolated node of E at (" + std::to_string(x[0]) +
                            (g.space.dim == 2 ? ", " + std::to_string(x[1]) : std::string()) +
                            "); refine h or smooth the mask");
    }
  }
  return g;
}

std::vector<double> uniform_times(double T, int steps) {
  if (!(T > 0.0) || steps < 1) throw InvalidArgument("uniform_times: need T > 0 and at least one step");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[static_cast<std::size_t>(k)] = T * k / steps;
  t.back() = T;
  return t;
}

namespace {

std::vector<double> march(double T, const std::function<double(double, int)>& step) {
  if (!(T > 0.0)) throw InvalidArgument("time grid: T must be positive");
  std::vector<double> t{0.0};
  for (int k = 0; t.back() < T; ++k) {
    const double tau = step(t.back(), k);
    if (!(tau > 0.0)) throw InvalidArgument("time grid: step must be positive");
    if (t.size() > 10'000'000) throw InvalidArgument("time grid: more than 1e7 steps");
    double next = t.back() + tau;
    // Avoid a sliver of a final step.
    if (next > T || T - next < 1e-3 * tau) next = T;
    t.push_back(next);
  }
  return t;
}

}  // namespace

std::vector<double> intrinsic_times(double T, double h, double p, double omega, double factor) {
  if (!(omega > 0.0) || !(factor > 0.0) || !(h > 0.0)) throw InvalidArgument("intrinsic_times: bad arguments");
  const double tau = factor * std::pow(omega, 2.0 - p) * std::pow(h, p);
  return march(T, [tau](double, int) { return tau; });
}

std::vector<double> graded_times(double T, double tau_min, double tau_max, double growth) {
  if (!(tau_min > 0.0) || tau_max < tau_min || !(growth >= 1.0)) {
    throw InvalidArgument("graded_times: need 0 < tau_min <= tau_max and growth >= 1");
  }
  return march(T, [=](double, int k) { return std::min(tau_max, tau_min * std::pow(growth, k)); });
}

BoundaryDatum BoundaryDatum::constant(double c) {
  BoundaryDatum d;
  d.g = [c](const Point&, double) { return c; };
  d.kind = "constant";
  d.modulus = "0";
  return d;
}

BoundaryDatum BoundaryDatum::linear(double c0, const std::vector<double>& c, double ct) {
  BoundaryDatum d;
  d.g = [c0, c, ct](const Point& x, double t) {
    double v = c0 + ct * t;
    for (int a = 0; a < x.dim() && a < static_cast<int>(c.size()); ++a) v += c[static_cast<std::size_t>(a)] * x[a];
    return v;
  };
  d.kind = "linear";
  d.modulus = "Lipschitz";
  return d;
}

BoundaryDatum BoundaryDatum::distance_ramp(const DomainSpec& domain, double width) {
  if (!(width > 0.0)) throw InvalidArgument("distance_ramp: width must be positive");
  BoundaryDatum d;
  d.g = [domain, width](const Point& x, double) {
    return std::min(1.0, domain.distance_to_complement(x) / width);
  };
  d.kind = "distance_ramp";
  d.modulus = "Lipschitz, constant 1/width";
  return d;
}

double barenblatt_value(double p, int N, double C, double r, double t) {
  const double l = N * (p - 2.0) + p;
  const double gp = (p - 2.0) / p * std::pow(l, -1.0 / (p - 1.0));
  const double inner = C - gp * std::pow(r * std::pow(t, -1.0 / l), p / (p - 1.0));
  if (inner <= 0.0) return 0.0;
  return std::pow(t, -N / l) * std::pow(inner, (p - 1.0) / (p - 2.0));
}

BoundaryDatum BoundaryDatum::barenblatt(double p, int N, double C, const Point& x0) {
  if (!(p > 2.0) || !(C > 0.0)) throw InvalidArgument("barenblatt: need p > 2 and C > 0");
  BoundaryDatum d;
  d.g = [p, N, C, x0](const Point& x, double t) {
    if (!(t > 0.0)) throw InvalidArgument("barenblatt: t must be positive");
    return barenblatt_value(p, N, C, distance(x, x0), t);
  };
  d.kind = "barenblatt";
  d.modulus = "Hoelder";
  return d;
}

SpaceTimeField solve(const SpaceTimeGrid& grid, const BoundaryDatum& datum, double p, const SchemeConfig& cfg) {
  if (!(p > 2.0)) throw InvalidArgument("solve: p must exceed 2");
  const std::size_t n = grid.space.size();
  if (grid.inside.size() != n) throw InvalidArgument("solve: mask size mismatch");

  SpaceTimeField f;
  f.grid = grid;
  f.p = p;
  f.values.resize(grid.times.size());
  f.iterations.assign(grid.times.size(), 0);

  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = datum(grid.space.node(k), grid.times[0]);
  f.values[0] = u;

  std::vector<std::uint8_t> fixed(n);
  for (std::size_t k = 0; k < n; ++k) fixed[k] = grid.inside[k] ? 0 : 1;
  const double hN = std::pow(grid.space.h, grid.space.dim);

  for (int s = 1; s <= grid.steps(); ++s) {
    const double t = grid.times[static_cast<std::size_t>(s)];
    const double tau = t - grid.times[static_cast<std::size_t>(s) - 1];
    const std::vector<double>& prev = f.values[static_cast<std::size_t>(s) - 1];
    std::vector<double> init = prev;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
      if (fixed[k]) init[k] = datum(grid.space.node(k), t);
      lo = std::min({lo, init[k], prev[k]});
      hi = std::max({hi, init[k], prev[k]});
    }
    ReweightedProblem rp;
    rp.grid = grid.space;
    rp.fixed = fixed;
    rp.p = p;
    rp.mass = hN / tau;
    rp.previous = prev;
    rp.lower = lo;
    rp.upper = hi;
    try {
      MinimizerResult r = minimize_reweighted(rp, std::move(init), cfg.solver, false);
      f.values[static_cast<std::size_t>(s)] = std::move(r.u);
      f.iterations[static_cast<std::size_t>(s)] = r.iterations;
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("time step " + std::to_string(s) + " (t = " + std::to_string(t) + "): " + e.what(),
                             e.last_energy(), e.iterations());
    }
  }
  return f;
}

double field_energy(const SpaceTimeField& field, int k) {
  return kernels::parallel::energy(field.grid.space, field.at(k), field.p);
}

double oscillation(const SpaceTimeField& field, const Point& x_o, double t_o, double rho, double omega_o, double p) {
  if (!(omega_o > 0.0) || !(rho > 0.0)) throw InvalidArgument("oscillation: rho and omega_o must be positive");
  const double t_lo = std::max(0.0, t_o - std::pow(omega_o, 2.0 - p) * std::pow(rho, p));
  const double slack = 1e-12 * std::max(1.0, std::abs(t_o));
  const auto& g = field.grid;
  const Cube cube(x_o, 2.0 * rho);
  const double xtol = 1e-9 * g.space.h;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool any = false;
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    if (g.times[k] < t_lo - slack || g.times[k] > t_o + slack) continue;
    const auto& u = field.values[k];
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!g.in_domain[i] || !cube.contains(g.space.node(i), xtol)) continue;
      lo = std::min(lo, u[i]);
      hi = std::max(hi, u[i]);
      any = true;
    }
  }
  if (!any) throw InvalidArgument("oscillation: the cylinder contains no grid node of E");
  return hi - lo;
}

double osc_g_on_lateral(const SpaceTimeGrid& grid, const BoundaryDatum& datum, const Point& x_o, double t_o,
                        double R_o, double time_depth, int samples) {
  if (samples < 1) throw InvalidArgument("osc_g_on_lateral: need at least one time sample");
  const Cube cube(x_o, 2.0 * R_o);
  const NodeGrid& s = grid.space;
  const double xtol = 1e-9 * s.h;
  std::vector<Point> nodes;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (grid.inside[k] || !cube.contains(s.node(k), xtol)) continue;
    const auto [i, j] = s.multi_index(k);
    bool next_to_inside = false;
    for (int di = -1; di <= 1; di += 2) {
      const int ii = i + di;
      if (ii >= 0 && ii < s.n && grid.inside[s.index(ii, j)]) next_to_inside = true;
      if (s.dim == 2) {
        const int jj = j + di;
        if (jj >= 0 && jj < s.n && grid.inside[s.index(i, jj)]) next_to_inside = true;
      }
    }
    if (next_to_inside) nodes.push_back(s.node(k));
  }
  if (nodes.empty()) return 0.0;
  const double t_lo = std::max(0.0, t_o - time_depth);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int m = 0; m < samples; ++m) {
    const double t = samples == 1 ? t_o : t_lo + (t_o - t_lo) * m / (samples - 1);
    for (const Point& x : nodes) {
      const double v = datum(x, t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return hi - lo;
}

std::pair<double, double> parabolic_boundary_range(const SpaceTimeGrid& grid, const BoundaryDatum& datum) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const NodeGrid& s = grid.space;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Point x = s.node(k);
    for (std::size_t m = 0; m < grid.times.size(); ++m) {
      if (m > 0 && grid.inside[k]) break;
      const double v = datum(x, grid.times[m]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

}  // namespace pwiener
