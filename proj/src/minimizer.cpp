#include "pwiener/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pwiener/errors.hpp"
#include "pwiener/kernels.hpp"

namespace pwiener {

namespace kp = kernels::parallel;

namespace {

double mass_term(const ReweightedProblem& pb, std::span<const double> u) {
  if (pb.mass == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (pb.fixed[k]) continue;
    const double d = u[k] - pb.previous[k];
    s += d * d;
  }
  return 0.5 * pb.mass * s;
}

// phi'(a) for phi(a) = J(u + a d); d vanishes on fixed nodes.
double directional_derivative(const ReweightedProblem& pb, std::span<const double> u, std::span<const double> d,
                              double a, std::vector<double>& scratch) {
  for (std::size_t k = 0; k < u.size(); ++k) scratch[k] = u[k] + a * d[k];
  double m = 0.0;
  if (pb.mass != 0.0) {
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!pb.fixed[k]) m += (scratch[k] - pb.previous[k]) * d[k];
    }
    m *= pb.mass;
  }
  return m + kp::energy_derivative(pb.grid, scratch, d, pb.p) / pb.p;
}

// Jacobi-preconditioned CG for (mass I + L_W) x = b on free nodes, x0 = 0.
long solve_linear(const ReweightedProblem& pb, const kernels::EdgeWeights& w, std::span<const double> b,
                  std::span<double> x, const SolverConfig& cfg) {
  const std::size_t n = b.size();
  std::vector<double> diag(n), r(b.begin(), b.end()), z(n), p(n), ap(n);
  kp::diagonal(pb.grid, w, pb.mass, pb.fixed, diag);
  std::fill(x.begin(), x.end(), 0.0);
  const double bnorm = std::sqrt(kp::dot(b, b));
  if (bnorm == 0.0) return 0;
  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
  p = z;
  double rz = kp::dot(r, z);
  long it = 0;
  for (; it < cfg.cg_max_iter; ++it) {
    kp::apply(pb.grid, w, pb.mass, pb.fixed, p, ap);
    const double pap = kp::dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    kp::axpy(alpha, p, x);
    kp::axpy(-alpha, ap, r);
    if (std::sqrt(kp::dot(r, r)) <= cfg.cg_rel_tol * bnorm) {
      ++it;
      break;
    }
    for (std::size_t k = 0; k < n; ++k) z[k] = r[k] / diag[k];
    const double rz_new = kp::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  return it;
}

// Minimiser of the convex phi(a) = J(u + a d) given phi'(0) < 0: bracket a
// sign change of phi', then Illinois false position on phi'.
double line_search(const ReweightedProblem& pb, std::span<const double> u, std::span<const double> d, double slope0,
                   std::vector<double>& scratch) {
  double lo = 0.0, flo = slope0;
  double hi = 1.0, fhi = directional_derivative(pb, u, d, hi, scratch);
  while (fhi < 0.0 && hi < 64.0) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = directional_derivative(pb, u, d, hi, scratch);
  }
  if (fhi <= 0.0) return hi;
  const double target = 1e-3 * std::abs(slope0);
  double a = hi;
  int side = 0;
  for (int it = 0; it < 40; ++it) {
    a = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(a > lo && a < hi)) a = 0.5 * (lo + hi);
    const double fa = directional_derivative(pb, u, d, a, scratch);
    if (std::abs(fa) <= target) break;
    if (fa < 0.0) {
      lo = a;
      flo = fa;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = a;
      fhi = fa;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-12 * hi) break;
  }
  return a;
}

}  // namespace

double reweighted_objective(const ReweightedProblem& pb, std::span<const double> u) {
  return mass_term(pb, u) + kp::energy(pb.grid, u, pb.p) / pb.p;
}

MinimizerResult minimize_reweighted(const ReweightedProblem& pb, std::vector<double> initial,
                                    const SolverConfig& cfg, bool laplace_start) {
  const std::size_t n = pb.grid.size();
  if (initial.size() != n || pb.fixed.size() != n) throw InvalidArgument("minimizer: size mismatch");
  if (pb.mass != 0.0 && pb.previous.size() != n) throw InvalidArgument("minimizer: previous state missing");
  if (!(pb.p > 1.0)) throw InvalidArgument("minimizer: p must exceed 1");

  MinimizerResult res;
  res.u = std::move(initial);
  for (std::size_t k = 0; k < n; ++k) {
    if (!pb.fixed[k]) res.u[k] = std::clamp(res.u[k], pb.lower, pb.upper);
  }
  double j_old = reweighted_objective(pb, res.u);
  res.objective_history.push_back(j_old);

  kernels::EdgeWeights w;
  std::vector<double> rhs(n), d(n), scratch(n), trial(n);
  bool converged = false;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const bool unit = laplace_start && it == 1;
    kp::edge_weights(pb.grid, res.u, unit ? 2.0 : pb.p, cfg.weight_floor, w);

    // rhs = -(mass (u - previous) + L_W u) on free nodes.
    kp::apply(pb.grid, w, 0.0, pb.fixed, res.u, rhs);
    for (std::size_t k = 0; k < n; ++k) {
      if (pb.fixed[k]) {
        rhs[k] = 0.0;
        continue;
      }
      double m = pb.mass != 0.0 ? pb.mass * (res.u[k] - pb.previous[k]) : 0.0;
      rhs[k] = -(rhs[k] + m);
    }
    res.linear_iterations += solve_linear(pb, w, rhs, d, cfg);
    res.iterations = it;

    const double slope0 = directional_derivative(pb, res.u, d, 0.0, scratch);
    if (!(slope0 < 0.0)) {
      converged = true;  // stationary to working precision
      break;
    }
    const double alpha = line_search(pb, res.u, d, slope0, scratch);
    double step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      trial[k] = res.u[k];
      if (pb.fixed[k]) continue;
      trial[k] = std::clamp(res.u[k] + alpha * d[k], pb.lower, pb.upper);
      step = std::max(step, std::abs(trial[k] - res.u[k]));
    }
    const double j_new = reweighted_objective(pb, trial);
    if (j_new > j_old) {
      // Rounding at the optimum; keep the monotone history.
      converged = (j_new - j_old) <= 1e-12 * std::abs(j_old) + std::numeric_limits<double>::min();
      break;
    }
    res.u.swap(trial);
    res.objective_history.push_back(j_new);
    const double rel = (j_old - j_new) / std::max(std::abs(j_new), std::numeric_limits<double>::min());
    j_old = j_new;
    if (unit) continue;
    if ((cfg.tol_rel_energy > 0.0 && rel < cfg.tol_rel_energy) || (cfg.step_tol > 0.0 && step <= cfg.step_tol)) {
      converged = true;
      break;
    }
  }
  res.energy = kp::energy(pb.grid, res.u, pb.p);
  if (!converged) {
    throw ConvergenceError("reweighted iteration did not converge in " + std::to_string(res.iterations) +
                               " iterations (last objective " + std::to_string(j_old) + ")",
                           j_old, res.iterations);
  }
  return res;
}

}  // namespace pwiener
