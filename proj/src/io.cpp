#include "pwiener/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "pwiener/errors.hpp"

namespace pwiener::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void CsvTable::comment(std::string_view text) {
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) comments_.push_back(line);
}

void CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw InvalidArgument("csv: row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) out += c.empty() ? "#\n" : "# " + c + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string cell(double v) { return format_double(v); }
std::string cell(long v) { return std::to_string(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_u64(std::string& s, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& s, double v) { put_u64(s, std::bit_cast<std::uint64_t>(v)); }

struct ByteReader {
  std::string_view bytes;
  std::size_t pos = 0;

  std::uint64_t take(int width) {
    if (pos + static_cast<std::size_t>(width) > bytes.size()) throw Error("snapshot: truncated data");
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(b)])) << (8 * b);
    }
    pos += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  std::uint64_t u64() { return take(8); }
  double f64() { return std::bit_cast<double>(take(8)); }
};

}  // namespace

Snapshot snapshot_of(const SpaceTimeField& field, int time_index) {
  Snapshot s;
  const auto& g = field.grid.space;
  s.dim = g.dim;
  s.n = g.n;
  s.h = g.h;
  s.center = g.center;
  s.time_index = static_cast<std::uint64_t>(time_index);
  s.t = field.grid.times.at(static_cast<std::size_t>(time_index));
  const auto u = field.at(time_index);
  s.values.assign(u.begin(), u.end());
  return s;
}

std::string snapshot_binary(const Snapshot& s) {
  std::string out = "PLFS";
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(s.dim));
  for (int a = 0; a < s.dim; ++a) put_u32(out, static_cast<std::uint32_t>(s.n));
  put_f64(out, s.h);
  for (int a = 0; a < s.dim; ++a) put_f64(out, s.center[a]);
  put_u64(out, s.time_index);
  put_f64(out, s.t);
  for (double v : s.values) put_f64(out, v);
  return out;
}

Snapshot parse_snapshot_binary(std::string_view bytes) {
  if (bytes.substr(0, 4) != "PLFS") throw Error("snapshot: bad magic");
  ByteReader r{bytes, 4};
  if (r.u32() != 1) throw Error("snapshot: unsupported version");
  Snapshot s;
  s.dim = static_cast<int>(r.u32());
  if (s.dim != 1 && s.dim != 2) throw Error("snapshot: dimension must be 1 or 2");
  s.n = static_cast<int>(r.u32());
  for (int a = 1; a < s.dim; ++a) {
    if (static_cast<int>(r.u32()) != s.n) throw Error("snapshot: unequal axis counts are not supported");
  }
  s.h = r.f64();
  std::vector<double> c(static_cast<std::size_t>(s.dim));
  for (auto& v : c) v = r.f64();
  s.center = Point::from(c);
  s.time_index = r.u64();
  s.t = r.f64();
  std::size_t count = static_cast<std::size_t>(s.n);
  if (s.dim == 2) count *= static_cast<std::size_t>(s.n);
  s.values.resize(count);
  for (auto& v : s.values) v = r.f64();
  if (r.pos != bytes.size()) throw Error("snapshot: trailing bytes");
  return s;
}

std::string snapshot_csv(const Snapshot& s) {
  NodeGrid g;
  g.dim = s.dim;
  g.n = s.n;
  g.h = s.h;
  g.center = s.center;
  CsvTable t(s.dim == 2 ? std::vector<std::string>{"x1", "x2", "u"} : std::vector<std::string>{"x1", "u"});
  std::string head = "PLFS 1 N=" + std::to_string(s.dim) + " n=" + std::to_string(s.n) + " h=" + format_double(s.h) +
                     " center=" + format_double(s.center[0]);
  if (s.dim == 2) head += "," + format_double(s.center[1]);
  head += " time_index=" + std::to_string(s.time_index) + " t=" + format_double(s.t);
  t.comment(head);
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    const Point x = g.node(k);
    if (s.dim == 2) {
      t.row({cell(x[0]), cell(x[1]), cell(s.values[k])});
    } else {
      t.row({cell(x[0]), cell(s.values[k])});
    }
  }
  return t.str();
}

Json to_json(const Point& p) { return Json(p.coords()); }

Json to_json(const StructureParams& s) {
  const auto& c = s.constants;
  return Json{{"p", s.p},
              {"N", s.N},
              {"constants",
               {{"gamma", c.gamma},
                {"bar_gamma", c.bar_gamma},
                {"gamma_1", c.gamma_1},
                {"gamma_2", c.gamma_2},
                {"gamma_star", c.gamma_star},
                {"gamma_3", c.gamma_3},
                {"nu", c.nu},
                {"harnack_c", c.harnack_c}}}};
}

Json to_json(const SolverConfig& c) {
  return Json{{"max_iter", c.max_iter},       {"tol_rel_energy", c.tol_rel_energy}, {"step_tol", c.step_tol},
              {"weight_floor", c.weight_floor}, {"cg_max_iter", c.cg_max_iter},     {"cg_rel_tol", c.cg_rel_tol}};
}

Json to_json(const CapacityProfile& p) {
  Json entries = Json::array();
  for (const auto& e : p.entries) {
    entries.push_back({{"i", e.i},
                       {"rho", e.rho},
                       {"delta", e.delta},
                       {"A", e.A},
                       {"cap_obstacle", e.cap_obstacle},
                       {"cap_full", e.cap_full},
                       {"iterations", e.iterations}});
  }
  return Json{{"R_o", p.R_o}, {"c_bar", p.c_bar}, {"p", p.p}, {"entries", entries}};
}

Json to_json(const WienerDiagnostic& d) {
  return Json{{"verdict", std::string(to_string(d.verdict))},
              {"tail_slope", d.tail_slope},
              {"max_ratio", d.max_ratio},
              {"window", d.window},
              {"heuristic", d.heuristic},
              {"note", "finite-sample heuristic; divergence cannot be decided from finitely many radii"}};
}

Json to_json(const Subsequence& s) {
  return Json{{"indices", s.indices}, {"truncated", s.truncated}, {"truncated_at", s.truncated_at}};
}

namespace {

Json checks_json(const std::vector<CascadeCheck>& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back({{"j", c.j}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
  return a;
}

}  // namespace

Json to_json(const CascadeReport& r) {
  Json cyl = Json::array();
  for (const auto& c : r.cylinders) {
    cyl.push_back({{"j", c.j},
                   {"base_index", c.base_index},
                   {"half_edge", c.half_edge},
                   {"time_depth", c.time_depth},
                   {"theta_bar", c.theta_bar}});
  }
  Json env = Json::array();
  for (const auto& e : r.envelope_at) {
    env.push_back({{"rho", e.rho},
                   {"wiener_sum", e.wiener_sum},
                   {"bound", e.bound},
                   {"cascade_level", e.cascade_level},
                   {"power_law_branch", e.power_law_branch}});
  }
  return Json{{"subsequence", to_json(r.subsequence)},
              {"lambda", r.lambda},
              {"c_bar", r.c_bar},
              {"mu_o", r.mu_o},
              {"epsilon", r.epsilon},
              {"in_req_holds", r.in_req_holds},
              {"power_law_branch", r.power_law_branch},
              {"power_law_bound", r.power_law_bound},
              {"mu_seq", r.mu_seq},
              {"cylinders", cyl},
              {"bar_c_all", r.bar_c_all},
              {"sub_bd_all", r.sub_bd_all},
              {"bound_chain_all", r.bound_chain_all},
              {"bar_c", checks_json(r.bar_c)},
              {"sub_bd", checks_json(r.sub_bd)},
              {"bound_chain", checks_json(r.bound_chain)},
              {"envelope_at", env}};
}

Json to_json(const HarnackProbeResult& r) {
  return Json{{"y", to_json(r.y)},
              {"s", r.s},
              {"rho", r.rho},
              {"c", r.c},
              {"avg", r.avg},
              {"inf_later", r.inf_later},
              {"theta", r.theta},
              {"window", {r.t_lo, r.t_hi}},
              {"window_samples", r.window_samples},
              {"ratio", r.ratio},
              {"average_branch", r.average_branch},
              {"smallness_holds", r.smallness_holds}};
}

Json to_json(const SpreadingProbeResult& r) {
  return Json{{"holds", r.holds}, {"fitted_nu", r.fitted_nu}, {"capped", r.capped}, {"samples", r.samples}};
}

Json to_json(const FitReport& f) {
  Json pts = Json::array();
  for (const auto& p : f.points) {
    pts.push_back({{"rho", p.rho},
                   {"osc", p.osc},
                   {"wiener_sum", p.wiener_sum},
                   {"log_osc", p.dropped ? Json(nullptr) : Json(p.log_osc)},
                   {"envelope", p.envelope},
                   {"within_envelope", p.within_envelope},
                   {"dropped", p.dropped}});
  }
  return Json{{"points", pts},
              {"fitted", f.fitted},
              {"used", f.used},
              {"slope", f.slope},
              {"intercept", f.intercept},
              {"correlation", f.correlation},
              {"all_within_envelope", f.all_within_envelope}};
}

Json to_json(const RealizedScale& r) {
  return Json{{"R_o", r.R_o}, {"epsilon", r.epsilon}, {"delta", r.delta}, {"time_depth", r.time_depth}, {"level", r.level}};
}

CsvTable envelope_csv(const CascadeReport& r) {
  CsvTable t({"rho", "wiener_sum", "envelope", "cascade_level", "power_law_branch"});
  for (const auto& e : r.envelope_at) {
    t.row({cell(e.rho), cell(e.wiener_sum), cell(e.bound), cell(e.cascade_level), cell(e.power_law_branch)});
  }
  return t;
}

}  // namespace pwiener::io
