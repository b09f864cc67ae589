#include "pwiener/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pwiener/errors.hpp"

namespace pwiener {

StructureParams StructureParams::defaults(double p, int N, double c_bar) {
  StructureParams s;
  s.p = p;
  s.N = N;
  s.derive(c_bar);
  return s;
}

void StructureParams::derive(double c_bar) {
  if (!(c_bar > 0.0 && c_bar < 1.0)) throw InvalidArgument("c_bar must lie in (0, 1)");
  constants.gamma_star = std::pow(constants.gamma_1, p - 2.0);
  constants.gamma_3 = 2.0 * constants.gamma_2 * std::log(1.0 / c_bar);
  constants.gamma = 1.0 / constants.gamma_3;
}

void StructureParams::validate() const {
  if (!(p > 2.0) || !std::isfinite(p)) throw InvalidArgument("p must be a finite number > 2");
  if (N != 1 && N != 2) throw InvalidArgument("N must be 1 or 2");
  const auto& c = constants;
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  if (!(c.bar_gamma >= 0.0)) throw InvalidArgument("bar_gamma must be nonnegative");
  if (!(c.gamma_1 > 1.0)) throw InvalidArgument("gamma_1 must exceed 1");
  if (!(c.gamma_2 > 1.0)) throw InvalidArgument("gamma_2 must exceed 1");
  if (!(c.gamma_star > 1.0)) throw InvalidArgument("gamma_star must exceed 1");
  if (!(c.gamma_3 > 0.0)) throw InvalidArgument("gamma_3 must be positive");
  if (!(c.nu > 0.0 && c.nu < 1.0)) throw InvalidArgument("nu must lie in (0, 1)");
  if (!(c.harnack_c > 0.0)) throw InvalidArgument("harnack_c must be positive");
}

namespace {

// Offset of `inner` inside `outer` in lattice steps, per axis.
std::array<int, 2> lattice_offset(const NodeGrid& outer, const NodeGrid& inner) {
  std::array<int, 2> off{0, 0};
  for (int a = 0; a < outer.dim; ++a) {
    const double s = (inner.center[a] - outer.center[a]) / outer.h + (outer.half_count() - inner.half_count());
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9) throw InvalidArgument("obstacle lattice is not aligned with the outer lattice");
    off[static_cast<std::size_t>(a)] = static_cast<int>(r);
  }
  return off;
}

}  // namespace

CapacityValue solve_condenser(const CondenserProblem& pb) {
  if (!(pb.p >= 2.0)) throw InvalidArgument("condenser: p must be at least 2");
  const NodeGrid& og = pb.obstacle.grid;
  if (og.dim != pb.outer.dim()) throw InvalidArgument("condenser: dimension mismatch");
  if (pb.obstacle.values.size() != og.size()) throw InvalidArgument("condenser: obstacle field has wrong size");
  const NodeGrid grid = NodeGrid::over(pb.outer, og.h);

  CapacityValue out;
  out.grid_h = grid.h;
  if (!pb.obstacle.any()) {
    out.energy_history.push_back(0.0);
    return out;
  }

  const auto off = lattice_offset(grid, og);
  std::vector<std::uint8_t> fixed(grid.size(), 0);
  std::vector<double> u(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.on_face(k)) fixed[k] = 1;
  }
  for (std::size_t k = 0; k < og.size(); ++k) {
    if (!pb.obstacle.values[k]) continue;
    const auto [i, j] = og.multi_index(k);
    const int gi = i + off[0], gj = og.dim == 2 ? j + off[1] : 0;
    if (gi < 0 || gi >= grid.n || gj < 0 || gj >= grid.n) {
      throw InvalidArgument("condenser: obstacle lies outside the outer cube");
    }
    const std::size_t g = grid.index(gi, gj);
    if (grid.on_face(g)) throw InvalidArgument("condenser: obstacle touches the outer boundary");
    fixed[g] = 1;
    u[g] = 1.0;
  }

  ReweightedProblem rp;
  rp.grid = grid;
  rp.fixed = fixed;
  rp.p = pb.p;
  MinimizerResult r = minimize_reweighted(rp, std::move(u), pb.solver, true);
  out.value = r.energy;
  out.iterations = r.iterations;
  out.energy_history.reserve(r.objective_history.size());
  for (double j : r.objective_history) out.energy_history.push_back(j * pb.p);
  for (double v : r.u) out.max_abs = std::max(out.max_abs, std::abs(v));
  return out;
}

DeltaValue delta(const DomainSpec& domain, const Point& x_o, double rho, const StructureParams& params,
                 const CapacityConfig& cfg) {
  if (!(rho > 0.0)) throw InvalidArgument("delta: rho must be positive");
  if (cfg.cells_per_radius < 8 || cfg.cells_per_radius % 2 != 0) {
    throw InvalidArgument("delta: cells_per_radius must be even and at least 8");
  }
  if (x_o.dim() != domain.dim()) throw InvalidArgument("delta: x_o has the wrong dimension");
  const double h = rho / cfg.cells_per_radius;
  const Cube inner(x_o, rho);
  const Cube outer(x_o, 1.5 * rho);

  CondenserProblem num;
  num.obstacle = rasterize_obstacle(domain, inner, h);
  num.outer = outer;
  num.p = params.p;
  num.solver = cfg.solver;

  DeltaValue out;
  out.grid_h = h;
  const CapacityValue cn = solve_condenser(num);

  CondenserProblem den = num;
  std::fill(den.obstacle.values.begin(), den.obstacle.values.end(), std::uint8_t{1});
  const CapacityValue cd = solve_condenser(den);

  if (!(cd.value > 1e-300)) throw NumericError("delta: full-cube capacity vanished");
  out.cap_obstacle = cn.value;
  out.cap_full = cd.value;
  out.iterations = cn.iterations + cd.iterations;
  double d = cn.value / cd.value;
  if (d > 1.0) {
    if (d - 1.0 >= 1e-8) {
      throw NumericError("delta: ratio " + std::to_string(d) + " exceeds 1 beyond discretisation noise");
    }
    d = 1.0;
  }
  out.delta = d;
  return out;
}

double parabolic_capacity(const std::vector<TimeSlice>& slices, const Cube& outer, double p,
                          const SolverConfig& cfg) {
  if (slices.empty()) throw InvalidArgument("parabolic_capacity: no time slices");
  if (slices.size() == 1) return 0.0;
  const double step = slices[1].tau - slices[0].tau;
  if (!(step > 0.0)) throw InvalidArgument("parabolic_capacity: slices must be increasing in tau");
  for (std::size_t k = 1; k < slices.size(); ++k) {
    const double s = slices[k].tau - slices[k - 1].tau;
    if (std::abs(s - step) > 1e-9 * std::max(1.0, std::abs(step))) {
      throw InvalidArgument("parabolic_capacity: tau spacing must be uniform");
    }
  }
  double sum = 0.0;
  double cached = 0.0;
  const IndicatorField* last = nullptr;
  for (std::size_t k = 0; k < slices.size(); ++k) {
    const IndicatorField& f = slices[k].obstacle;
    const bool same = last && last->values == f.values && last->grid.n == f.grid.n && last->grid.h == f.grid.h &&
                      last->grid.center == f.grid.center;
    if (!same) {
      CondenserProblem pb{f, outer, p, cfg};
      cached = solve_condenser(pb).value;
      last = &f;
    }
    const double w = (k == 0 || k + 1 == slices.size()) ? 0.5 : 1.0;
    sum += w * cached;
  }
  return step * sum;
}

}  // namespace pwiener
