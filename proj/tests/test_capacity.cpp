#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pwiener/capacity.hpp"
#include "pwiener/errors.hpp"

using namespace pwiener;

namespace {

IndicatorField interval_obstacle(double rho, double h) {
  // Obstacle [-rho, rho] on the lattice of K_rho(0), N = 1.
  IndicatorField f;
  f.grid = NodeGrid::over(Cube(Point(0.0), rho), h);
  f.values.assign(f.grid.size(), 1);
  return f;
}

IndicatorField all_nodes(const Cube& c, double h) {
  IndicatorField f;
  f.grid = NodeGrid::over(c, h);
  f.values.assign(f.grid.size(), 1);
  return f;
}

}  // namespace

TEST_CASE("structure parameter defaults") {
  const auto s = StructureParams::defaults(3.0, 2, 0.25);
  CHECK(s.constants.gamma_1 == 2.0);
  CHECK(s.constants.gamma_2 == 2.0);
  CHECK(s.constants.gamma_star == doctest::Approx(2.0));
  CHECK(s.constants.gamma_3 == doctest::Approx(4.0 * std::log(4.0)));
  CHECK(s.constants.gamma == doctest::Approx(1.0 / (4.0 * std::log(4.0))));
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.p = 2.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("1D condenser, p = 2: 2 / rho") {
  for (double rho : {1.0, 0.5}) {
    CondenserProblem pr{interval_obstacle(rho, rho / 16.0), Cube(Point(0.0), 2.0 * rho), 2.0, {}};
    const auto v = solve_condenser(pr);
    CHECK(v.value == doctest::Approx(2.0 / rho).epsilon(1e-9));
  }
}

TEST_CASE("1D condenser, p > 2: 2 rho^(1-p)") {
  for (double p : {2.5, 3.0, 4.0}) {
    for (double rho : {1.0, 0.25}) {
      CAPTURE(p);
      CAPTURE(rho);
      CondenserProblem pr{interval_obstacle(rho, rho / 32.0), Cube(Point(0.0), 2.0 * rho), p, {}};
      const auto v = solve_condenser(pr);
      CHECK(v.value == doctest::Approx(oracle::condenser_1d(p, rho)).epsilon(1e-6));
      for (std::size_t i = 1; i < v.energy_history.size(); ++i) {
        CHECK(v.energy_history[i] <= v.energy_history[i - 1] * (1.0 + 1e-14));
      }
      CHECK(v.max_abs <= 1.0);
    }
  }
}

TEST_CASE("empty obstacle has zero capacity") {
  IndicatorField f = all_nodes(Cube(Point(0.0, 0.0), 0.5), 1.0 / 16.0);
  std::fill(f.values.begin(), f.values.end(), 0);
  CondenserProblem pr{f, Cube(Point(0.0, 0.0), 1.0), 3.0, {}};
  CHECK(solve_condenser(pr).value == 0.0);
}

TEST_CASE("condenser rejects obstacles reaching the outer faces") {
  CondenserProblem pr{all_nodes(Cube(Point(0.0, 0.0), 1.0), 0.125), Cube(Point(0.0, 0.0), 1.0), 3.0, {}};
  CHECK_THROWS_AS(solve_condenser(pr), InvalidArgument);
  // Centre shifted by 0.4 lattice steps.
  CondenserProblem off{all_nodes(Cube(Point(0.05, 0.0), 0.5), 0.125), Cube(Point(0.0, 0.0), 1.0), 3.0, {}};
  CHECK_THROWS_AS(solve_condenser(off), InvalidArgument);
}

TEST_CASE("delta at the extremes") {
  const auto params = StructureParams::defaults(3.0, 2, 0.25);
  CapacityConfig cfg;
  cfg.cells_per_radius = 8;
  SUBCASE("no obstacle") {
    const auto half = DomainSpec::half_space(Point(0.0, 0.0));
    // K_rho((-1, 0)) lies inside E.
    const auto d = delta(half, Point(-1.0, 0.0), 0.25, params, cfg);
    CHECK(d.delta == 0.0);
    CHECK(d.cap_obstacle == 0.0);
  }
  SUBCASE("obstacle covers the cube") {
    const auto removed = DomainSpec::exterior_cube(Cube(Point(0.0, 0.0), 2.0), Point(2.0, 0.0));
    const auto d = delta(removed, Point(0.0, 0.0), 0.5, params, cfg);
    CHECK(std::abs(d.delta - 1.0) <= 1e-10);
  }
}

TEST_CASE("half-space delta is scale invariant") {
  const auto params = StructureParams::defaults(3.0, 2, 0.25);
  CapacityConfig cfg;
  cfg.cells_per_radius = 16;
  const auto half = DomainSpec::half_space(Point(0.0, 0.0));
  const auto a = delta(half, Point(0.0, 0.0), 0.25, params, cfg);
  const auto b = delta(half, Point(0.0, 0.0), 0.5, params, cfg);
  CHECK(a.delta > 0.0);
  CHECK(a.delta < 1.0);
  CHECK(std::abs(a.delta - b.delta) <= 0.02 * b.delta);
}

TEST_CASE("2D capacity scales like rho^(N-p)") {
  // cap(K_rho, K_2rho) on matched lattices.
  std::vector<double> x, y;
  for (double rho : {1.0, 0.5, 0.25}) {
    const double h = rho / 16.0;
    CondenserProblem pr{all_nodes(Cube(Point(0.0, 0.0), rho), h), Cube(Point(0.0, 0.0), 2.0 * rho), 3.0, {}};
    x.push_back(std::log(rho));
    y.push_back(std::log(solve_condenser(pr).value));
  }
  CHECK(oracle::least_squares(x, y).slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("parabolic capacity of time-constant sets") {
  const double rho = 0.5, a = 0.2, b = 0.7;
  const Cube outer(Point(0.0), 2.0 * rho);
  const auto obstacle = interval_obstacle(rho, rho / 32.0);
  std::vector<TimeSlice> slices;
  for (int k = 0; k <= 10; ++k) slices.push_back({a + (b - a) * k / 10.0, obstacle});
  const double elliptic = solve_condenser({obstacle, outer, 3.0, {}}).value;
  const double gp = parabolic_capacity(slices, outer, 3.0, {});
  CHECK(std::abs(gp - (b - a) * elliptic) <= 1e-12 * std::abs(gp));
  CHECK(gp == doctest::Approx((b - a) * oracle::condenser_1d(3.0, rho)).epsilon(1e-6));

  auto empty = obstacle;
  std::fill(empty.values.begin(), empty.values.end(), 0);
  std::vector<TimeSlice> none;
  for (int k = 0; k <= 4; ++k) none.push_back({0.1 * k, empty});
  CHECK(parabolic_capacity(none, outer, 3.0, {}) == 0.0);

  CHECK_THROWS(parabolic_capacity({}, outer, 3.0, {}));
  std::vector<TimeSlice> uneven{{0.0, obstacle}, {0.1, obstacle}, {0.3, obstacle}};
  CHECK_THROWS(parabolic_capacity(uneven, outer, 3.0, {}));
}
