#include "pwiener/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pwiener/errors.hpp"

namespace pwiener {

namespace {

std::string where(const std::string& src, const YAML::Mark& m) {
  if (m.is_null()) return src;
  return src + ": line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

// Walks one YAML mapping, remembering which keys were read so that
// leftovers can be reported as unknown.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path, const std::string& src)
      : node_(node), path_(std::move(path)), src_(src) {
    if (!node.IsMap()) fail(node, "expected a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(where(src_, at.Mark()) + ": " + (path_.empty() ? "" : path_ + ": ") + msg);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return static_cast<bool>(node_[key]);
  }

  YAML::Node at(const std::string& key) {
    seen_.insert(key);
    YAML::Node n = node_[key];
    if (!n) fail(node_, "missing required key '" + key + "'");
    return n;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& src() const { return src_; }

  template <class T>
  T scalar(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) throw ConfigError(where(src_, n.Mark()) + ": " + child(key) + ": expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(where(src_, n.Mark()) + ": " + child(key) + ": cannot read '" + n.Scalar() + "' as " +
                        type_name<T>());
    }
  }

  template <class T>
  T get(const std::string& key) {
    return scalar<T>(at(key), key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    return has(key) ? scalar<T>(node_[key], key) : fallback;
  }

  /// Number or the string "auto" (empty optional).
  std::optional<double> get_auto(const std::string& key) {
    if (!has(key)) return std::nullopt;
    YAML::Node n = node_[key];
    if (n.IsScalar() && n.Scalar() == "auto") return std::nullopt;
    return scalar<double>(n, key);
  }

  std::vector<double> numbers(const std::string& key, bool required = false) {
    if (!has(key)) {
      if (required) fail(node_, "missing required key '" + key + "'");
      return {};
    }
    YAML::Node n = node_[key];
    if (!n.IsSequence()) throw ConfigError(where(src_, n.Mark()) + ": " + child(key) + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(scalar<double>(e, key));
    return out;
  }

  std::vector<int> integers(const std::string& key) {
    std::vector<int> out;
    if (!has(key)) return out;
    YAML::Node n = node_[key];
    if (!n.IsSequence()) throw ConfigError(where(src_, n.Mark()) + ": " + child(key) + ": expected a list of integers");
    for (const auto& e : n) out.push_back(scalar<int>(e, key));
    return out;
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string k = kv.first.Scalar();
      if (!seen_.count(k)) {
        throw ConfigError(where(src_, kv.first.Mark()) + ": unknown key '" + child(k) + "'");
      }
    }
  }

  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, double>) return "a number";
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) return "an integer";
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    return "a string";
  }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& src_;
  std::set<std::string> seen_;
};

void check(bool ok, const MapReader& r, const YAML::Node& at, const std::string& msg) {
  if (!ok) r.fail(at, msg);
}

Point point_from(MapReader& r, const std::string& key, int N) {
  YAML::Node n = r.at(key);
  const auto v = r.numbers(key, true);
  check(static_cast<int>(v.size()) == N, r, n, "'" + key + "' needs " + std::to_string(N) + " coordinates");
  return Point::from(v);
}

SolverConfig read_solver(MapReader& r, SolverConfig s) {
  s.max_iter = r.get<int>("max_iter", s.max_iter);
  s.tol_rel_energy = r.get<double>("tol_rel_energy", s.tol_rel_energy);
  s.step_tol = r.get<double>("step_tol", s.step_tol);
  s.weight_floor = r.get<double>("weight_floor", s.weight_floor);
  s.cg_max_iter = r.get<int>("cg_max_iter", s.cg_max_iter);
  s.cg_rel_tol = r.get<double>("cg_rel_tol", s.cg_rel_tol);
  return s;
}

void validate_solver(const SolverConfig& s, const MapReader& r, const YAML::Node& at) {
  check(s.max_iter >= 1, r, at, "max_iter must be at least 1");
  check(s.tol_rel_energy >= 0.0 && s.tol_rel_energy < 1.0, r, at, "tol_rel_energy must lie in [0, 1)");
  check(s.tol_rel_energy > 0.0 || s.step_tol > 0.0, r, at, "one of tol_rel_energy, step_tol must be positive");
  check(s.weight_floor > 0.0, r, at, "weight_floor must be positive");
  check(s.cg_max_iter >= 1 && s.cg_rel_tol > 0.0, r, at, "bad linear solver settings");
}

DomainSpec read_domain(const YAML::Node& node, int N, const std::string& src) {
  MapReader r(node, "domain", src);
  const std::string kind = r.get<std::string>("kind");
  DomainKind k{};
  try {
    k = domain_kind_from_string(kind);
  } catch (const Error&) {
    r.fail(node["kind"], "unknown domain kind '" + kind + "'");
  }
  Point anchor = k == DomainKind::full_space && !r.has("anchor")
                     ? (N == 1 ? Point(0.0) : Point(0.0, 0.0))
                     : point_from(r, "anchor", N);
  const auto params = r.numbers("params");
  r.finish();
  try {
    return DomainSpec::make(k, params, anchor);
  } catch (const InvalidArgument& e) {
    r.fail(node, e.what());
  }
}

SyntheticProfileConfig read_synthetic(const YAML::Node& node, const std::string& src) {
  MapReader r(node, "profile.synthetic", src);
  SyntheticProfileConfig s;
  s.deltas = r.numbers("deltas");
  s.generator = r.get<std::string>("generator", "");
  s.count = r.get<int>("count", 0);
  s.level = r.get<double>("level", s.level);
  s.ratio = r.get<double>("ratio", s.ratio);
  s.noise = r.get<double>("noise", s.noise);
  s.profiles = r.get<int>("profiles", s.profiles);
  r.finish();
  check(s.deltas.empty() != s.generator.empty(), r, node, "give exactly one of 'deltas' or 'generator'");
  if (!s.generator.empty()) {
    static const std::set<std::string> kinds{"constant", "geometric", "noisy_constant", "random_diverging"};
    check(kinds.count(s.generator) > 0, r, node["generator"], "unknown generator '" + s.generator + "'");
    check(s.count >= 1, r, node, "generator needs count >= 1");
  }
  for (double d : s.deltas) check(d >= 0.0 && d <= 1.0, r, node["deltas"], "deltas must lie in [0, 1]");
  check(s.profiles >= 1, r, node, "profiles must be at least 1");
  return s;
}

PdeConfig read_pde(const YAML::Node& node, int N, const std::string& src) {
  MapReader r(node, "pde", src);
  PdeConfig c;
  {
    YAML::Node b = r.at("box");
    MapReader br(b, "pde.box", src);
    const Point center = point_from(br, "center", N);
    const double half = br.get<double>("half_edge");
    br.finish();
    check(half > 0.0, br, b, "half_edge must be positive");
    c.box = Cube(center, half);
  }
  c.h = r.get<double>("h");
  check(c.h > 0.0, r, node["h"], "h must be positive");
  c.T = r.get<double>("T");
  if (r.has("time")) {
    YAML::Node tn = node["time"];
    MapReader tr(tn, "pde.time", src);
    auto& t = c.time;
    t.kind = tr.get<std::string>("kind", t.kind);
    t.t_start = tr.get<double>("t_start", t.t_start);
    t.steps = tr.get<int>("steps", t.steps);
    t.factor = tr.get<double>("factor", t.factor);
    t.omega = tr.get<double>("omega", t.omega);
    t.tau_min = tr.get<double>("tau_min", t.tau_min);
    t.tau_max = tr.get<double>("tau_max", t.tau_max);
    t.growth = tr.get<double>("growth", t.growth);
    tr.finish();
    check(t.kind == "uniform" || t.kind == "intrinsic" || t.kind == "graded", tr, tn,
          "time.kind must be uniform, intrinsic or graded");
    check(t.t_start >= 0.0, tr, tn, "t_start must be nonnegative");
  }
  check(c.T > c.time.t_start, r, node["T"], "T must exceed time.t_start");
  {
    YAML::Node dn = r.at("datum");
    MapReader dr(dn, "pde.datum", src);
    auto& d = c.datum;
    d.kind = dr.get<std::string>("kind");
    d.value = dr.get<double>("value", d.value);
    d.c0 = dr.get<double>("c0", d.c0);
    d.c = dr.numbers("c");
    d.ct = dr.get<double>("ct", d.ct);
    d.width = dr.get<double>("width", d.width);
    d.C = dr.get<double>("C", d.C);
    d.center = dr.numbers("center");
    dr.finish();
    static const std::set<std::string> kinds{"constant", "linear", "distance_ramp", "barenblatt"};
    check(kinds.count(d.kind) > 0, dr, dn["kind"], "unknown datum kind '" + d.kind + "'");
    check(d.c.empty() || static_cast<int>(d.c.size()) == N, dr, dn, "datum.c needs N coefficients");
    check(d.center.empty() || static_cast<int>(d.center.size()) == N, dr, dn, "datum.center needs N coordinates");
  }
  if (r.has("solver")) {
    YAML::Node sn = node["solver"];
    MapReader sr(sn, "pde.solver", src);
    c.scheme.solver = read_solver(sr, c.scheme.solver);
    sr.finish();
    validate_solver(c.scheme.solver, sr, sn);
  }
  c.snapshots = r.integers("snapshots");
  c.lateral_samples = r.get<int>("lateral_samples", c.lateral_samples);
  r.finish();
  return c;
}

}  // namespace

const DomainSpec& ExperimentConfig::require_domain() const {
  if (!domain) throw ConfigError("the configuration has no 'domain' section");
  return *domain;
}

Point ExperimentConfig::anchor_point() const {
  if (x_o) return *x_o;
  return require_domain().anchor();
}

StructureParams ExperimentConfig::structure(double c_bar) const {
  StructureParams s;
  s.p = p;
  s.N = N;
  s.constants = constants.values;
  auto& c = s.constants;
  if (constants.gamma_star_auto) c.gamma_star = std::pow(c.gamma_1, p - 2.0);
  if (constants.gamma_3_auto) c.gamma_3 = 2.0 * c.gamma_2 * std::log(1.0 / c_bar);
  if (constants.gamma_auto) c.gamma = 1.0 / c.gamma_3;
  s.validate();
  return s;
}

ExperimentConfig parse_config(const std::string& text, const std::string& src) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(where(src, e.mark) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(src + ": empty configuration");
  MapReader r(root, "", src);
  ExperimentConfig c;
  c.raw_text = text;
  c.schema_version = r.get<int>("schema_version");
  check(c.schema_version == config_schema_version, r, root["schema_version"],
        "unsupported schema_version " + std::to_string(c.schema_version) + " (expected " +
            std::to_string(config_schema_version) + ")");
  c.name = r.get<std::string>("name", c.name);
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.output_dir = r.get<std::string>("output_dir", c.output_dir);
  c.t_o = r.get<double>("t_o", c.t_o);
  check(c.t_o > 0.0, r, root["t_o"], "t_o must be positive");

  {
    YAML::Node pn = r.at("params");
    MapReader pr(pn, "params", src);
    c.p = pr.get<double>("p");
    c.N = pr.get<int>("N");
    check(c.p > 2.0, pr, pn["p"], "p must exceed 2");
    check(c.N == 1 || c.N == 2, pr, pn["N"], "N must be 1 or 2");
    if (pr.has("constants")) {
      YAML::Node cn = pn["constants"];
      MapReader cr(cn, "params.constants", src);
      auto& v = c.constants.values;
      v.gamma_1 = cr.get<double>("gamma_1", v.gamma_1);
      v.gamma_2 = cr.get<double>("gamma_2", v.gamma_2);
      v.bar_gamma = cr.get<double>("bar_gamma", v.bar_gamma);
      v.nu = cr.get<double>("nu", v.nu);
      v.harnack_c = cr.get<double>("harnack_c", v.harnack_c);
      if (auto x = cr.get_auto("gamma_star")) {
        v.gamma_star = *x;
        c.constants.gamma_star_auto = false;
      }
      if (auto x = cr.get_auto("gamma_3")) {
        v.gamma_3 = *x;
        c.constants.gamma_3_auto = false;
      }
      if (auto x = cr.get_auto("gamma")) {
        v.gamma = *x;
        c.constants.gamma_auto = false;
      }
      cr.finish();
      check(v.gamma_1 > 1.0 && v.gamma_2 > 1.0, cr, cn, "gamma_1 and gamma_2 must exceed 1");
      check(v.bar_gamma >= 0.0, cr, cn, "bar_gamma must be nonnegative");
      check(v.nu > 0.0 && v.nu < 1.0, cr, cn, "nu must lie in (0, 1)");
      check(v.harnack_c > 0.0, cr, cn, "harnack_c must be positive");
    }
    pr.finish();
  }

  if (r.has("domain")) c.domain = read_domain(root["domain"], c.N, src);
  if (r.has("x_o")) {
    c.x_o = point_from(r, "x_o", c.N);
  }

  if (r.has("capacity")) {
    YAML::Node cn = root["capacity"];
    MapReader cr(cn, "capacity", src);
    c.capacity.cells_per_radius = cr.get<int>("cells_per_radius", c.capacity.cells_per_radius);
    c.capacity.solver = read_solver(cr, c.capacity.solver);
    c.capacity_radii = cr.numbers("radii");
    cr.finish();
    check(c.capacity.cells_per_radius >= 8 && c.capacity.cells_per_radius % 2 == 0, cr, cn,
          "cells_per_radius must be even and at least 8");
    validate_solver(c.capacity.solver, cr, cn);
    for (double rho : c.capacity_radii) check(rho > 0.0, cr, cn["radii"], "radii must be positive");
  }

  if (r.has("profile")) {
    YAML::Node pn = root["profile"];
    MapReader pr(pn, "profile", src);
    auto& p = c.profile;
    p.R_o = pr.get_auto("R_o");
    p.R_max = pr.get<double>("R_max", p.R_max);
    p.search_levels = pr.get<int>("search_levels", p.search_levels);
    p.epsilon = pr.get<double>("epsilon", p.epsilon);
    p.depth = pr.get<int>("depth", p.depth);
    p.c_bar = pr.get_auto("c_bar");
    p.mu_o = pr.get<double>("mu_o", p.mu_o);
    p.wiener_window = pr.get<int>("wiener_window", p.wiener_window);
    if (pr.has("synthetic")) p.synthetic = read_synthetic(pn["synthetic"], src);
    pr.finish();
    check(!p.R_o || *p.R_o > 0.0, pr, pn, "R_o must be positive");
    check(p.R_max > 0.0 && p.search_levels >= 1, pr, pn, "bad R_o search range");
    check(p.epsilon > 0.0 && p.epsilon < 1.0, pr, pn, "epsilon must lie in (0, 1)");
    check(p.depth >= 1, pr, pn, "depth must be at least 1");
    check(!p.c_bar || (*p.c_bar > 0.0 && *p.c_bar < 1.0), pr, pn, "c_bar must lie in (0, 1)");
    check(p.mu_o > 0.0, pr, pn, "mu_o must be positive");
  }

  if (r.has("pde")) c.pde = read_pde(root["pde"], c.N, src);

  if (r.has("probes")) {
    YAML::Node pn = root["probes"];
    MapReader pr(pn, "probes", src);
    c.probes.radii = pr.numbers("radii");
    if (pr.has("harnack")) {
      YAML::Node hn = pn["harnack"];
      check(hn.IsSequence(), pr, hn, "harnack must be a list");
      for (const auto& e : hn) {
        MapReader er(e, "probes.harnack[]", src);
        HarnackProbeConfig h;
        h.y = er.numbers("y", true);
        h.s = er.get<double>("s");
        h.rho = er.get<double>("rho");
        er.finish();
        check(static_cast<int>(h.y.size()) == c.N && h.rho > 0.0, er, e, "need y with N coordinates and rho > 0");
        c.probes.harnack.push_back(h);
      }
    }
    if (pr.has("spreading")) {
      YAML::Node sn = pn["spreading"];
      check(sn.IsSequence(), pr, sn, "spreading must be a list");
      for (const auto& e : sn) {
        MapReader er(e, "probes.spreading[]", src);
        SpreadingProbeConfig s;
        s.y = er.numbers("y", true);
        s.rho = er.get<double>("rho");
        s.t_bar = er.get<double>("t_bar");
        s.k = er.get<double>("k");
        er.finish();
        check(static_cast<int>(s.y.size()) == c.N && s.rho > 0.0 && s.k > 0.0, er, e,
              "need y with N coordinates, rho > 0 and k > 0");
        c.probes.spreading.push_back(s);
      }
    }
    pr.finish();
    for (double rho : c.probes.radii) check(rho > 0.0, pr, pn["radii"], "radii must be positive");
  }
  r.finish();
  if (c.domain && c.domain->dim() != c.N) throw ConfigError(src + ": domain dimension differs from params.N");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<double> make_times(const PdeConfig& pde, double p) {
  const auto& t = pde.time;
  const double span = pde.T - t.t_start;
  std::vector<double> out;
  if (t.kind == "uniform") {
    out = uniform_times(span, t.steps);
  } else if (t.kind == "intrinsic") {
    out = intrinsic_times(span, pde.h, p, t.omega, t.factor);
  } else {
    out = graded_times(span, t.tau_min, t.tau_max, t.growth);
  }
  for (double& v : out) v += t.t_start;
  out.back() = pde.T;
  return out;
}

BoundaryDatum make_datum(const DatumConfig& d, const DomainSpec& domain, double p, int N) {
  if (d.kind == "constant") return BoundaryDatum::constant(d.value);
  if (d.kind == "linear") return BoundaryDatum::linear(d.c0, d.c, d.ct);
  if (d.kind == "distance_ramp") return BoundaryDatum::distance_ramp(domain, d.width);
  Point c = N == 1 ? Point(0.0) : Point(0.0, 0.0);
  if (!d.center.empty()) c = Point::from(d.center);
  return BoundaryDatum::barenblatt(p, N, d.C, c);
}

}  // namespace pwiener
