#include "pwiener/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "pwiener/errors.hpp"
#include "pwiener/pde.hpp"
#include "pwiener/probes.hpp"

namespace pwiener {

namespace fs = std::filesystem;
using io::cell;
using io::Json;

namespace {

fs::path out_dir(const ExperimentConfig& cfg, const RunOptions& opt) {
  return opt.out_dir ? *opt.out_dir : fs::path(cfg.output_dir);
}

std::uint64_t seed_of(const ExperimentConfig& cfg, const RunOptions& opt) { return opt.seed ? *opt.seed : cfg.seed; }

Json header(const ExperimentConfig& cfg, const RunOptions& opt, const char* command) {
  return Json{{"tool", "pwiener"},
              {"version", PWIENER_VERSION},
              {"command", command},
              {"schema_version", cfg.schema_version},
              {"name", cfg.name},
              {"seed", seed_of(cfg, opt)},
              {"config", cfg.raw_text}};
}

void echo_config(io::CsvTable& t, const ExperimentConfig& cfg) {
  t.comment("pwiener " PWIENER_VERSION " config:");
  t.comment(cfg.raw_text);
}

void write_json(const fs::path& path, const Json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

class StageClock {
 public:
  void start(const std::string& name) {
    name_ = name;
    t0_ = std::chrono::steady_clock::now();
  }
  void stop(Json& timings) const {
    timings[name_] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point t0_;
};

// Runs body(i) for i in [0, n) over the OpenMP team; the first exception wins.
template <class F>
void parallel_each(int n, F&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(pwiener_experiment_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

io::CsvTable profile_csv(const CapacityProfile& pr) {
  io::CsvTable t({"i", "rho", "delta", "A", "cap_obstacle", "cap_full", "iters"});
  for (const auto& e : pr.entries) {
    t.row({cell(e.i), cell(e.rho), cell(e.delta), cell(e.A), cell(e.cap_obstacle), cell(e.cap_full),
           cell(e.iterations)});
  }
  return t;
}

const PdeConfig& require_pde(const ExperimentConfig& cfg) {
  if (!cfg.pde) throw ConfigError("the configuration has no 'pde' section");
  return *cfg.pde;
}

int resolve_index(int k, int count) {
  const int r = k < 0 ? count + k : k;
  if (r < 0 || r >= count) throw ConfigError("snapshot index " + std::to_string(k) + " outside the time grid");
  return r;
}

// Config echo as "# " lines, for text files not built through CsvTable.
std::string config_comment(const ExperimentConfig& cfg) {
  std::string out = "# pwiener " PWIENER_VERSION " config:\n";
  std::istringstream in(cfg.raw_text);
  std::string line;
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

void write_snapshots(const SpaceTimeField& f, const std::vector<int>& which, const ExperimentConfig& cfg,
                     const fs::path& dir, Json& files) {
  const int count = static_cast<int>(f.values.size());
  for (int k : which) {
    const int idx = resolve_index(k, count);
    const io::Snapshot s = io::snapshot_of(f, idx);
    const std::string stem = "snapshot_" + std::to_string(idx);
    io::write_atomic(dir / (stem + ".plfs"), io::snapshot_binary(s));
    io::write_atomic(dir / (stem + ".csv"), config_comment(cfg) + io::snapshot_csv(s));
    files.push_back(stem + ".plfs");
    files.push_back(stem + ".csv");
  }
}

// Max and min over nodes of E in K_{2R}(x_o) x [t_lo, t_o].
std::pair<double, double> range_on_cylinder(const SpaceTimeField& f, const Point& x_o, double R, double t_lo,
                                            double t_o) {
  const auto& g = f.grid;
  const Cube cube(x_o, 2.0 * R);
  const double tol = 1e-9 * g.space.h;
  const double slack = 1e-12 * std::max(1.0, std::abs(t_o));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    const double t = g.times[k];
    if (t > t_o + slack || t < t_lo - slack) continue;
    for (std::size_t i = 0; i < g.space.size(); ++i) {
      if (!g.in_domain[i] || !cube.contains(g.space.node(i), tol)) continue;
      lo = std::min(lo, f.values[k][i]);
      hi = std::max(hi, f.values[k][i]);
    }
  }
  if (lo > hi) throw NumericError("the cylinder Q_{R_o} contains no grid node of E");
  return {lo, hi};
}

// sup of g over lateral nodes of Q_{R_o}; the level k of the truncation.
double lateral_sup(const SpaceTimeGrid& g, const BoundaryDatum& datum, const Point& x_o, double R, double t_lo,
                   double t_o, int samples) {
  const Cube cube(x_o, 2.0 * R);
  const auto& s = g.space;
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (g.inside[k] || !cube.contains(s.node(k), 1e-9 * s.h)) continue;
    const auto [i, j] = s.multi_index(k);
    bool touches = false;
    for (int d = -1; d <= 1; d += 2) {
      if (i + d >= 0 && i + d < s.n && g.inside[s.index(i + d, j)]) touches = true;
      if (s.dim == 2 && j + d >= 0 && j + d < s.n && g.inside[s.index(i, j + d)]) touches = true;
    }
    if (!touches) continue;
    for (int m = 0; m < samples; ++m) {
      const double t = samples == 1 ? t_o : t_lo + (t_o - t_lo) * m / (samples - 1);
      sup = std::max(sup, datum(s.node(k), t));
    }
  }
  return sup;
}

}  // namespace

CBarChoice resolve_c_bar(const ExperimentConfig& cfg) {
  if (cfg.profile.c_bar) {
    const double c = *cfg.profile.c_bar;
    const double l = -std::log2(c);
    const int lambda = std::abs(l - std::round(l)) < 1e-12 ? static_cast<int>(std::round(l)) : 0;
    return {lambda, c};
  }
  StructureParams s;
  s.p = cfg.p;
  s.N = cfg.N;
  s.constants = cfg.constants.values;
  return choose_c_bar(s);
}

std::vector<CapacityProfile> synthetic_profiles(const ExperimentConfig& cfg, double c_bar, std::uint64_t seed) {
  if (!cfg.profile.synthetic) throw ConfigError("cascade needs a 'profile.synthetic' section");
  const auto& s = *cfg.profile.synthetic;
  const double R_o = cfg.profile.R_o.value_or(1.0);
  std::vector<CapacityProfile> out;
  if (!s.deltas.empty()) {
    out.push_back(CapacityProfile::from_deltas(R_o, c_bar, cfg.p, s.deltas));
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < s.profiles; ++k) {
    std::vector<double> A(static_cast<std::size_t>(s.count));
    for (int i = 0; i < s.count; ++i) {
      double a = s.level;
      if (s.generator == "geometric") {
        a = s.level * std::pow(s.ratio, i);
      } else if (s.generator == "noisy_constant") {
        a = s.level * (1.0 + s.noise * (2.0 * unit(rng) - 1.0));
      } else if (s.generator == "random_diverging") {
        // log-uniform in [ratio * level, level]
        a = s.level * std::exp(std::log(s.ratio) * unit(rng));
      }
      A[static_cast<std::size_t>(i)] = std::clamp(a, std::numeric_limits<double>::min(), 1.0);
    }
    out.push_back(CapacityProfile::from_amplitudes(R_o, c_bar, cfg.p, A));
  }
  return out;
}

Json cmd_capacity(const ExperimentConfig& cfg, const RunOptions& opt) {
  const DomainSpec& domain = cfg.require_domain();
  if (cfg.capacity_radii.empty()) throw ConfigError("capacity: 'capacity.radii' is empty");
  const Point x_o = cfg.anchor_point();
  const CBarChoice cb = resolve_c_bar(cfg);
  const StructureParams params = cfg.structure(cb.c_bar);
  std::vector<DeltaValue> rows(cfg.capacity_radii.size());
  parallel_each(static_cast<int>(rows.size()), [&](int i) {
    rows[static_cast<std::size_t>(i)] =
        delta(domain, x_o, cfg.capacity_radii[static_cast<std::size_t>(i)], params, cfg.capacity);
  });

  io::CsvTable t({"rho", "cap_obstacle", "cap_full", "delta", "iters"});
  echo_config(t, cfg);
  Json j = header(cfg, opt, "capacity");
  Json arr = Json::array();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const double rho = cfg.capacity_radii[k];
    t.row({cell(rho), cell(r.cap_obstacle), cell(r.cap_full), cell(r.delta), cell(r.iterations)});
    arr.push_back({{"rho", rho},
                   {"cap_obstacle", r.cap_obstacle},
                   {"cap_full", r.cap_full},
                   {"delta", r.delta},
                   {"iters", r.iterations},
                   {"grid_h", r.grid_h}});
  }
  j["params"] = io::to_json(params);
  j["solver"] = io::to_json(cfg.capacity.solver);
  j["cells_per_radius"] = cfg.capacity.cells_per_radius;
  j["rows"] = arr;
  const fs::path dir = out_dir(cfg, opt);
  io::write_atomic(dir / "capacity.csv", t.str());
  write_json(dir / "capacity.json", j);
  return j;
}

Json cmd_delta_profile(const ExperimentConfig& cfg, const RunOptions& opt) {
  const DomainSpec& domain = cfg.require_domain();
  const Point x_o = cfg.anchor_point();
  const CBarChoice cb = resolve_c_bar(cfg);
  const StructureParams params = cfg.structure(cb.c_bar);
  Json j = header(cfg, opt, "delta-profile");
  j["params"] = io::to_json(params);
  j["lambda"] = cb.lambda;
  double R_o = 0.0;
  if (cfg.profile.R_o) {
    R_o = *cfg.profile.R_o;
  } else {
    const RealizedScale rs = realize_R_o_epsilon(cfg.t_o, domain, x_o, params, cfg.profile.epsilon, cfg.profile.R_max,
                                                 cfg.profile.search_levels, cfg.capacity);
    R_o = rs.R_o;
    j["realized"] = io::to_json(rs);
  }
  const CapacityProfile pr = build_profile(domain, x_o, R_o, cb.c_bar, cfg.profile.depth, params, cfg.capacity);
  j["profile"] = io::to_json(pr);
  if (pr.depth() >= 4) j["wiener_point"] = io::to_json(is_wiener_point(pr, cfg.profile.wiener_window));
  io::CsvTable t = profile_csv(pr);
  echo_config(t, cfg);
  const fs::path dir = out_dir(cfg, opt);
  io::write_atomic(dir / "profile.csv", t.str());
  write_json(dir / "profile.json", j);
  return j;
}

Json cmd_cascade(const ExperimentConfig& cfg, const RunOptions& opt) {
  const CBarChoice cb = resolve_c_bar(cfg);
  const StructureParams params = cfg.structure(cb.c_bar);
  const auto profiles = synthetic_profiles(cfg, cb.c_bar, seed_of(cfg, opt));
  Json j = header(cfg, opt, "cascade");
  j["params"] = io::to_json(params);
  j["lambda"] = cb.lambda;
  j["c_bar"] = cb.c_bar;
  io::CsvTable summary({"k", "depth", "picks", "truncated", "truncated_at", "bar_c_all", "sub_bd_all",
                        "bound_chain_all", "power_law_branch"});
  echo_config(summary, cfg);
  Json runs = Json::array();
  bool all_ok = true;
  std::vector<CascadeReport> reports;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const CascadeReport r = oscillation_cascade(cfg.profile.mu_o, profiles[k], params, cfg.profile.epsilon);
    all_ok = all_ok && r.bar_c_all && r.sub_bd_all && r.bound_chain_all;
    summary.row({cell(static_cast<int>(k)), cell(profiles[k].depth()),
                 cell(static_cast<int>(r.subsequence.indices.size())), cell(r.subsequence.truncated),
                 cell(r.subsequence.truncated_at), cell(r.bar_c_all), cell(r.sub_bd_all), cell(r.bound_chain_all),
                 cell(r.power_law_branch)});
    Json run{{"profile", io::to_json(profiles[k])}, {"cascade", io::to_json(r)}};
    if (profiles[k].depth() >= 4) run["wiener_point"] = io::to_json(is_wiener_point(profiles[k], cfg.profile.wiener_window));
    runs.push_back(std::move(run));
    reports.push_back(r);
  }
  j["all_checks_hold"] = all_ok;
  j["runs"] = runs;
  const fs::path dir = out_dir(cfg, opt);
  io::CsvTable env = io::envelope_csv(reports.front());
  echo_config(env, cfg);
  io::write_atomic(dir / "envelope.csv", env.str());
  io::write_atomic(dir / "cascade_summary.csv", summary.str());
  write_json(dir / "cascade.json", j);
  return j;
}

Json cmd_solve(const ExperimentConfig& cfg, const RunOptions& opt) {
  const DomainSpec& domain = cfg.require_domain();
  const PdeConfig& pc = require_pde(cfg);
  const SpaceTimeGrid grid = SpaceTimeGrid::make(pc.box, pc.h, domain, make_times(pc, cfg.p));
  const BoundaryDatum datum = make_datum(pc.datum, domain, cfg.p, cfg.N);
  const auto t0 = std::chrono::steady_clock::now();
  const SpaceTimeField f = solve(grid, datum, cfg.p, pc.scheme);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto [glo, ghi] = parabolic_boundary_range(grid, datum);
  io::CsvTable t({"k", "t", "energy", "iters", "min", "max"});
  echo_config(t, cfg);
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  long total_iters = 0;
  for (int k = 0; k <= grid.steps(); ++k) {
    const auto u = f.at(k);
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    umin = std::min(umin, *lo);
    umax = std::max(umax, *hi);
    total_iters += f.iterations[static_cast<std::size_t>(k)];
    t.row({cell(k), cell(grid.times[static_cast<std::size_t>(k)]), cell(field_energy(f, k)),
           cell(f.iterations[static_cast<std::size_t>(k)]), cell(*lo), cell(*hi)});
  }
  Json j = header(cfg, opt, "solve");
  j["grid"] = {{"n", grid.space.n},
               {"h", grid.space.h},
               {"steps", grid.steps()},
               {"t_start", grid.times.front()},
               {"T", grid.final_time()},
               {"unknowns", std::count(grid.inside.begin(), grid.inside.end(), std::uint8_t{1})}};
  j["datum"] = {{"kind", datum.kind}, {"modulus", datum.modulus}};
  j["solver"] = io::to_json(pc.scheme.solver);
  j["reweighting_iterations"] = total_iters;
  j["range"] = {{"min", umin}, {"max", umax}, {"data_min", glo}, {"data_max", ghi}};
  j["maximum_principle"] = umin >= glo - 1e-9 && umax <= ghi + 1e-9;
  const fs::path dir = out_dir(cfg, opt);
  Json files = Json::array();
  write_snapshots(f, pc.snapshots.empty() ? std::vector<int>{0, -1} : pc.snapshots, cfg, dir, files);
  j["snapshots"] = files;
  j["timings"] = {{"solve", elapsed}};
  io::write_atomic(dir / "energy.csv", t.str());
  write_json(dir / "solve.json", j);
  return j;
}

Json cmd_verify(const ExperimentConfig& cfg, const RunOptions& opt) {
  const fs::path dir = out_dir(cfg, opt);
  Json j = header(cfg, opt, "verify");
  Json timings = Json::object();
  StageClock clock;
  clock.start("setup");
  try {
    const DomainSpec& domain = cfg.require_domain();
    const PdeConfig& pc = require_pde(cfg);
    const Point x_o = cfg.anchor_point();
    if (cfg.probes.radii.size() < 3) throw ConfigError("verify: 'probes.radii' needs at least 3 radii");
    if (cfg.t_o > pc.T) throw ConfigError("verify: t_o lies beyond pde.T");

    clock.start("choose_c_bar");
    const CBarChoice cb = resolve_c_bar(cfg);
    const StructureParams params = cfg.structure(cb.c_bar);
    j["params"] = io::to_json(params);
    j["lambda"] = cb.lambda;
    j["c_bar"] = cb.c_bar;
    clock.stop(timings);

    clock.start("realize_R_o_epsilon");
    RealizedScale rs;
    if (cfg.profile.R_o) {
      rs = realize_R_o_epsilon(
          cfg.t_o, [&](double R) { return delta(domain, x_o, R, params, cfg.capacity).delta; }, params,
          cfg.profile.epsilon, *cfg.profile.R_o, 1);
    } else {
      rs = realize_R_o_epsilon(cfg.t_o, domain, x_o, params, cfg.profile.epsilon, cfg.profile.R_max,
                               cfg.profile.search_levels, cfg.capacity);
    }
    j["realized"] = io::to_json(rs);
    clock.stop(timings);

    clock.start("build_profile");
    const CapacityProfile pr = build_profile(domain, x_o, rs.R_o, cb.c_bar, cfg.profile.depth, params, cfg.capacity);
    j["profile"] = io::to_json(pr);
    if (pr.depth() >= 4) j["wiener_point"] = io::to_json(is_wiener_point(pr, cfg.profile.wiener_window));
    clock.stop(timings);

    clock.start("solve");
    const SpaceTimeGrid grid = SpaceTimeGrid::make(pc.box, pc.h, domain, make_times(pc, cfg.p));
    const BoundaryDatum datum = make_datum(pc.datum, domain, cfg.p, cfg.N);
    const SpaceTimeField f = solve(grid, datum, cfg.p, pc.scheme);
    long iters = 0;
    for (int v : f.iterations) iters += v;
    j["solve"] = {{"n", grid.space.n}, {"h", grid.space.h}, {"steps", grid.steps()}, {"reweighting_iterations", iters}};
    clock.stop(timings);

    clock.start("cascade");
    const double t_lo = cfg.t_o - rs.time_depth;
    const auto [lo, hi] = range_on_cylinder(f, x_o, rs.R_o, t_lo, cfg.t_o);
    const double omega_o = hi - lo;
    const double level = lateral_sup(grid, datum, x_o, rs.R_o, t_lo, cfg.t_o, pc.lateral_samples);
    const double mu_o = std::max(0.0, hi - level);
    j["omega_o"] = omega_o;
    j["truncation_level"] = level;
    j["mu_o"] = mu_o;
    if (mu_o > 0.0) {
      j["cascade"] = io::to_json(oscillation_cascade(mu_o, pr, params, cfg.profile.epsilon));
    } else {
      j["cascade"] = {{"skipped", "u does not exceed the lateral data on Q_{R_o} (mu_o = 0)"}};
    }
    clock.stop(timings);
    if (!(omega_o > 0.0)) throw NumericError("omega_o vanished: the solution is constant on Q_{R_o}");

    clock.start("oscillation");
    std::vector<Measurement> ms;
    for (double rho : cfg.probes.radii) {
      if (!(rho < rs.R_o)) throw ConfigError("verify: probe radius " + io::format_double(rho) + " is not below R_o");
      ms.push_back({rho, oscillation(f, x_o, cfg.t_o, rho, omega_o, cfg.p)});
    }
    const double osc_g = osc_g_on_lateral(grid, datum, x_o, cfg.t_o, rs.R_o, rs.time_depth, pc.lateral_samples);
    j["osc_g"] = osc_g;
    clock.stop(timings);

    clock.start("envelope_regression");
    EnvelopeParams env{omega_o, osc_g, cfg.profile.epsilon, rs.R_o, params};
    const FitReport fit = envelope_regression(ms, pr, env);
    j["regression"] = io::to_json(fit);

    // Oscillations sorted by decreasing radius should not increase.
    auto sorted = ms;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.rho > b.rho; });
    bool monotone = true;
    for (std::size_t k = 1; k < sorted.size(); ++k) monotone = monotone && sorted[k].osc <= sorted[k - 1].osc * 1.05;
    j["checks"] = {{"slope_negative", fit.fitted && fit.slope < 0.0},
                   {"correlation_at_least_0_9", fit.fitted && std::abs(fit.correlation) >= 0.9},
                   {"oscillation_monotone", monotone},
                   {"all_within_envelope", fit.all_within_envelope}};

    io::CsvTable t({"rho", "wiener_sum", "envelope", "osc", "within_envelope", "dropped", "power_law_branch"});
    echo_config(t, cfg);
    const bool power = j["cascade"].contains("power_law_branch") && j["cascade"]["power_law_branch"].get<bool>();
    std::string dat = config_comment(cfg) + "# rho wiener_sum envelope osc log_osc\n";
    for (const auto& p : fit.points) {
      t.row({cell(p.rho), cell(p.wiener_sum), cell(p.envelope), cell(p.osc), cell(p.within_envelope), cell(p.dropped),
             cell(power)});
      dat += io::format_double(p.rho) + " " + io::format_double(p.wiener_sum) + " " + io::format_double(p.envelope) +
             " " + io::format_double(p.osc) + " " + io::format_double(p.log_osc) + "\n";
    }
    io::write_atomic(dir / "envelope.csv", t.str());
    io::write_atomic(dir / "envelope.dat", dat);
    io::CsvTable pt = profile_csv(pr);
    echo_config(pt, cfg);
    io::write_atomic(dir / "profile.csv", pt.str());
    clock.stop(timings);

    clock.start("probes");
    Json harnack = Json::array();
    for (const auto& h : cfg.probes.harnack) {
      harnack.push_back(io::to_json(weak_harnack_probe(f, Point::from(h.y), h.s, h.rho, params)));
    }
    Json spreading = Json::array();
    for (const auto& s : cfg.probes.spreading) {
      Json e = io::to_json(spreading_probe(f, Point::from(s.y), s.rho, s.t_bar, s.k, params));
      e["input"] = {{"y", s.y}, {"rho", s.rho}, {"t_bar", s.t_bar}, {"k", s.k}};
      spreading.push_back(e);
    }
    j["harnack"] = harnack;
    j["spreading"] = spreading;
    Json files = Json::array();
    if (!pc.snapshots.empty()) write_snapshots(f, pc.snapshots, cfg, dir, files);
    j["snapshots"] = files;
    clock.stop(timings);

    j["status"] = "ok";
    j["timings"] = timings;
    write_json(dir / "report.json", j);
    return j;
  } catch (const std::exception& e) {
    j["status"] = "failed";
    j["failed_stage"] = clock.name();
    j["error"] = e.what();
    j["timings"] = timings;
    write_json(dir / "report.json", j);
    throw;
  }
}

}  // namespace pwiener
