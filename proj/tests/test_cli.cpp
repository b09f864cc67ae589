#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pwiener/config.hpp"
#include "pwiener/errors.hpp"
#include "pwiener/experiments.hpp"
#include "pwiener/io.hpp"

using namespace pwiener;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pwiener_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Data rows of a CSV, comment lines and header skipped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml, "test.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* const minimal = "schema_version: 1\nparams:\n  p: 3\n  N: 2\n";

}  // namespace

TEST_CASE("config: minimal file takes defaults") {
  const auto c = parse_config(minimal);
  CHECK(c.p == 3.0);
  CHECK(c.N == 2);
  CHECK(c.capacity.cells_per_radius == 16);
  CHECK_FALSE(c.domain.has_value());
  CHECK(c.raw_text == minimal);
}

TEST_CASE("config: errors carry line and column") {
  auto e = error_of("schema_version: 1\nparams:\n  p: 3\n  N: 2\n  q: 4\n");
  CHECK(e.find("test.yaml") != std::string::npos);
  CHECK(e.find("line 5") != std::string::npos);
  CHECK(e.find("q") != std::string::npos);

  e = error_of("schema_version: 1\nparams:\n  p: 1.5\n  N: 2\n");
  CHECK(e.find("line 3") != std::string::npos);

  e = error_of("schema_version: 2\nparams:\n  p: 3\n  N: 2\n");
  CHECK(e.find("line 1") != std::string::npos);

  e = error_of(std::string(minimal) + "domain:\n  kind: torus\n  anchor: [0, 0]\n");
  CHECK(e.find("line 6") != std::string::npos);
  CHECK(e.find("torus") != std::string::npos);

  e = error_of(std::string(minimal) + "capacity:\n  radii: [0.5, -1]\n");
  CHECK(e.find("line 6") != std::string::npos);

  e = error_of("schema_version: 1\nparams: [3, 2]\n");
  CHECK_FALSE(e.empty());
  CHECK(error_of("schema_version: 1\nparams:\n  p: three\n  N: 2\n").find("line 3") != std::string::npos);
  CHECK_FALSE(error_of("schema_version: 1\n").empty());
  CHECK_FALSE(error_of("params: {p: 3, N: 2}\n").empty());
}

TEST_CASE("config: auto constants and time grids") {
  const auto c = parse_config(std::string(minimal) + "profile:\n  c_bar: auto\n  R_o: 0.25\n");
  CHECK_FALSE(c.profile.c_bar.has_value());
  CHECK(*c.profile.R_o == 0.25);
  const auto s = c.structure(0.25);
  CHECK(s.constants.gamma_3 == doctest::Approx(4.0 * std::log(4.0)));

  const auto fixed = parse_config("schema_version: 1\nparams:\n  p: 3\n  N: 2\n  constants:\n    gamma_3: 7\n");
  CHECK(fixed.structure(0.25).constants.gamma_3 == 7.0);
  CHECK(fixed.structure(0.25).constants.gamma == doctest::Approx(1.0 / 7.0));

  const auto b = parse_config(
      "schema_version: 1\nparams: {p: 3, N: 1}\ndomain: {kind: full_space}\n"
      "pde:\n  box: {center: [0], half_edge: 1}\n  h: 0.125\n  T: 2\n  time: {kind: uniform, t_start: 1, steps: 4}\n"
      "  datum: {kind: constant, value: 1}\n");
  CHECK(make_times(*b.pde, b.p) == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
}

TEST_CASE("csv cells keep 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 7.0 * 1e-20, -123456.789012345678, 6.02214076e23}) {
    const std::string s = io::cell(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  io::CsvTable t({"a", "b"});
  t.comment("line one\nline two");
  t.row({io::cell(1), io::cell(true)});
  CHECK(t.str() == "# line one\n# line two\na,b\n1,1\n");
  CHECK_THROWS(t.row({"1"}));
}

TEST_CASE("snapshot binary round trip") {
  const auto grid = SpaceTimeGrid::make(Cube(Point(0.5, -0.25), 0.5), 0.125, DomainSpec::full_space(2), uniform_times(1.0, 3));
  SpaceTimeField f{grid, 3.0, {}, {}};
  for (int k = 0; k <= 3; ++k) {
    std::vector<double> v(grid.space.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(static_cast<double>(i * (k + 1)));
    f.values.push_back(v);
  }
  const auto s = io::snapshot_of(f, 2);
  const std::string bytes = io::snapshot_binary(s);
  CHECK(bytes.substr(0, 4) == "PLFS");
  CHECK(bytes.size() == 4 + 4 + 4 + 2 * 4 + 8 + 2 * 8 + 8 + 8 + 81 * 8);
  const auto back = io::parse_snapshot_binary(bytes);
  CHECK(back.dim == 2);
  CHECK(back.n == 9);
  CHECK(back.h == 0.125);
  CHECK(back.center == Point(0.5, -0.25));
  CHECK(back.time_index == 2);
  CHECK(back.t == grid.times[2]);
  CHECK(back.values == f.values[2]);
  CHECK_THROWS(io::parse_snapshot_binary(bytes.substr(0, bytes.size() - 1)));
  CHECK_THROWS(io::parse_snapshot_binary("XXXX" + bytes.substr(4)));

  const auto csv = csv_rows(io::snapshot_csv(s));
  CHECK(csv.size() == 81);
  CHECK(std::stod(csv[10][2]) == f.values[2][10]);
}

TEST_CASE("atomic writes leave no temporaries") {
  const auto dir = scratch("atomic");
  io::write_atomic(dir / "a.txt", "first");
  io::write_atomic(dir / "a.txt", "second");
  CHECK(slurp(dir / "a.txt") == "second");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
}

TEST_CASE("capacity command") {
  const auto dir = scratch("capacity");
  auto cfg = parse_config(std::string(minimal) +
                          "domain: {kind: exterior_cube, anchor: [0, 0], params: [0.5, 0, 0.5]}\n"
                          "capacity: {cells_per_radius: 8, radii: [0.25, 0.125, 0.0625]}\n");
  cmd_capacity(cfg, {dir, {}});
  const std::string text = slurp(dir / "capacity.csv");
  CHECK(text.find("rho,cap_obstacle,cap_full,delta,iters\n") != std::string::npos);
  CHECK(text.find("# schema_version: 1") != std::string::npos);
  const auto rows = csv_rows(text);
  REQUIRE(rows.size() == 3);
  std::vector<double> x, y;
  for (const auto& r : rows) {
    REQUIRE(r.size() == 5);
    const double d = std::stod(r[3]);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    x.push_back(std::log(std::stod(r[0])));
    y.push_back(std::log(std::stod(r[2])));
  }
  CHECK(oracle::least_squares(x, y).slope == doctest::Approx(-1.0).epsilon(0.05));

  cfg = parse_config(std::string(minimal) + "domain: {kind: full_space}\ncapacity: {cells_per_radius: 8, radii: [0.5, 0.25]}\n");
  cmd_capacity(cfg, {dir, {}});
  for (const auto& r : csv_rows(slurp(dir / "capacity.csv"))) CHECK(std::stod(r[3]) == 0.0);
}

TEST_CASE("cascade command") {
  const auto dir = scratch("cascade");
  auto cfg = parse_config(std::string(minimal) +
                          "profile:\n  R_o: 1\n  c_bar: auto\n  synthetic: {deltas: [1, 1, 1, 1, 1]}\n");
  auto j = cmd_cascade(cfg, {dir, {}});
  const auto mu = j["runs"][0]["cascade"]["mu_seq"];
  for (std::size_t k = 0; k < mu.size(); ++k) CHECK(mu[k].get<double>() == std::ldexp(1.0, -static_cast<int>(k)));
  CHECK(j["all_checks_hold"].get<bool>());

  cfg = parse_config(std::string(minimal) +
                     "profile:\n  R_o: 1\n  synthetic: {deltas: [1, 0.25, 0.0625, 0.015625]}\n");
  j = cmd_cascade(cfg, {dir, {}});
  // A_i = 2^-i never beats the halving ratio strictly.
  CHECK(j["runs"][0]["cascade"]["subsequence"]["truncated"].get<bool>());
  CHECK(j["runs"][0]["cascade"]["subsequence"]["truncated_at"].get<int>() == 0);

  cfg = parse_config(std::string(minimal) +
                     "seed: 3\nprofile:\n  R_o: 1\n  synthetic: {generator: random_diverging, count: 30, profiles: 100}\n");
  j = cmd_cascade(cfg, {dir, {}});
  CHECK(j["runs"].size() == 100);
  CHECK(j["all_checks_hold"].get<bool>());
}

TEST_CASE("verify command") {
  const std::string text = std::string(minimal) +
                           "seed: 5\nt_o: 1\n"
                           "domain: {kind: slit, anchor: [0, 0], params: [1]}\n"
                           "capacity: {cells_per_radius: 8}\n"
                           "profile: {R_o: auto, R_max: 0.5, depth: 4, epsilon: 0.5}\n"
                           "pde:\n  box: {center: [0, 0], half_edge: 1}\n  h: 0.0625\n  T: 1\n"
                           "  time: {kind: uniform, steps: 20}\n  datum: {kind: distance_ramp, width: 0.5}\n"
                           "probes:\n  radii: [0.125, 0.0625, 0.03125]\n"
                           "  harnack: [{y: [0, 0], s: 0.5, rho: 0.25}]\n";
  const auto cfg = parse_config(text);

  SUBCASE("slit run reports a negative slope, reproducibly") {
    const auto dir = scratch("verify");
    cmd_verify(cfg, {dir, {}});
    auto first = io::Json::parse(slurp(dir / "report.json"));
    CHECK(first["status"] == "ok");
    CHECK(first["regression"]["slope"].get<double>() < 0.0);
    for (const char* f : {"envelope.csv", "envelope.dat", "profile.csv"}) CHECK(fs::exists(dir / f));
    cmd_verify(cfg, {dir, {}});
    auto second = io::Json::parse(slurp(dir / "report.json"));
    first.erase("timings");
    second.erase("timings");
    CHECK(first.dump() == second.dump());
  }

  SUBCASE("an empty obstacle fails at the scale search") {
    auto bad = cfg;
    bad.domain = DomainSpec::half_space(Point(0.0, 0.0));
    bad.x_o = Point(-0.9, 0.0);
    const auto dir = scratch("verify_fail");
    CHECK_THROWS_AS(cmd_verify(bad, {dir, {}}), NumericError);
    const auto r = io::Json::parse(slurp(dir / "report.json"));
    CHECK(r["status"] == "failed");
    CHECK(r["failed_stage"] == "realize_R_o_epsilon");
  }
}

#ifdef PWIENER_CLI
namespace {

int run_cli(const std::string& args) {
  const int status = std::system((std::string(PWIENER_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  std::ofstream(dir / "bad.yaml") << "schema_version: 1\nparams: {p: 3, N: 2}\nbogus: 1\n";
  std::ofstream(dir / "ok.yaml") << "schema_version: 1\nparams: {p: 3, N: 2}\nprofile:\n  R_o: 1\n"
                                    "  synthetic: {deltas: [1, 1, 1]}\n";
  std::ofstream(dir / "numeric.yaml")
      << "schema_version: 1\nparams: {p: 3, N: 2}\nprofile:\n  R_o: 1\n  synthetic: {deltas: [0, 1, 1]}\n";
  const std::string out = " --out " + (dir / "out").string();
  CHECK(run_cli("cascade --config " + (dir / "ok.yaml").string() + out) == 0);
  CHECK(run_cli("cascade --config " + (dir / "bad.yaml").string() + out) == 2);
  CHECK(run_cli("cascade --config " + (dir / "missing.yaml").string() + out) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("cascade --config " + (dir / "numeric.yaml").string() + out) == 3);
  CHECK(run_cli("cascade --workers 2 --seed 9 --config " + (dir / "ok.yaml").string() + out) == 0);
}
#endif
