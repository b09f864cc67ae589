#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pwiener/errors.hpp"
#include "pwiener/geometry.hpp"

using namespace pwiener;

TEST_CASE("membership of simple domains") {
  const auto half = DomainSpec::half_space(Point(0.0, 0.0));
  CHECK(contains(half, Point(-1.0, 0.0)));
  CHECK_FALSE(contains(half, Point(1.0, 0.0)));

  const auto slit = DomainSpec::slit(Point(0.0, 0.0), 1.0);
  CHECK_FALSE(contains(slit, Point(0.5, 0.0)));
  CHECK(contains(slit, Point(0.5, 0.01)));
  CHECK(contains(slit, Point(-0.01, 0.0)));

  const auto cube = DomainSpec::exterior_cube(Cube(Point(0.0, 0.0), 1.0), Point(1.0, 0.0));
  CHECK_FALSE(contains(cube, Point(0.0, 0.0)));
  CHECK_FALSE(contains(cube, Point(1.0, 1.0)));  // closed cube removed
  CHECK(contains(cube, Point(1.0 + 1e-9, 0.0)));

  CHECK(contains(DomainSpec::full_space(2), Point(3.0, -7.0)));
}

TEST_CASE("boundary points") {
  CHECK(DomainSpec::half_space(Point(0.0, 0.0)).is_boundary_point(Point(0.0, 0.0)));
  CHECK(DomainSpec::slit(Point(0.0, 0.0), 1.0).is_boundary_point(Point(0.0, 0.0)));
  CHECK(DomainSpec::slit(Point(0.0, 0.0), 1.0).is_boundary_point(Point(0.5, 0.0)));
  CHECK_FALSE(DomainSpec::full_space(2).is_boundary_point(Point(0.0, 0.0)));
  const auto cube = DomainSpec::exterior_cube(Cube(Point(0.5, 0.0), 0.5), Point(0.0, 0.0));
  CHECK(cube.is_boundary_point(Point(0.0, 0.0)));
  CHECK_FALSE(cube.is_boundary_point(Point(0.5, 0.0)));  // interior of E^c
  CHECK_THROWS_AS(DomainSpec::exterior_cube(Cube(Point(0.5, 0.0), 0.5), Point(-1.0, 0.0)).validate_anchor(),
                  InvalidArgument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::slit, {}, Point(0.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::slit, {-1.0}, Point(0.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::cantor_obstacle, {3, 0.6, 1.0}, Point(0.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(DomainSpec::make(DomainKind::custom_mask, {0.0, 1.0, 0.0}, Point(0.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(domain_kind_from_string("sphere"), Error);
  for (auto k : {DomainKind::full_space, DomainKind::half_space, DomainKind::exterior_cube, DomainKind::slit,
                 DomainKind::power_cusp, DomainKind::cantor_obstacle, DomainKind::custom_mask}) {
    CHECK(domain_kind_from_string(to_string(k)) == k);
  }
}

TEST_CASE("node grid layout") {
  const auto g = NodeGrid::over(Cube(Point(1.0, -1.0), 0.5), 0.125);
  CHECK(g.n == 9);
  CHECK(g.size() == 81);
  const Point first = g.node(0);
  CHECK(first[0] == doctest::Approx(0.5));
  CHECK(first[1] == doctest::Approx(-1.5));
  const Point mid = g.node(g.index(4, 4));
  CHECK(mid[0] == doctest::Approx(1.0));
  CHECK(mid[1] == doctest::Approx(-1.0));
  CHECK(g.on_face(g.index(0, 3)));
  CHECK_FALSE(g.on_face(g.index(1, 3)));
  CHECK_THROWS_AS(NodeGrid::over(Cube(Point(0.0, 0.0), 0.5), 0.3), InvalidArgument);
}

TEST_CASE("rasterize: empty and full obstacles") {
  const auto empty = rasterize_obstacle(DomainSpec::full_space(2), Cube(Point(0.0, 0.0), 1.0), 0.125);
  CHECK(empty.count() == 0);

  // K_1((0, 0)) inside the removed cube K_2((0, 0)).
  const auto removed = DomainSpec::exterior_cube(Cube(Point(0.0, 0.0), 2.0), Point(2.0, 0.0));
  const auto full = rasterize_obstacle(removed, Cube(Point(0.0, 0.0), 1.0), 0.125);
  CHECK(full.count() == full.values.size());
}

TEST_CASE("rasterize: slit nodes match a brute-force distance scan") {
  const double rho = 1.0, h = rho / 8.0;
  // Slit of length rho through the centre of K_rho(0): segment [-rho/2, rho/2] x {0}.
  const auto slit = DomainSpec::slit(Point(-rho / 2.0, 0.0), rho);
  const Cube inner(Point(0.0, 0.0), rho);
  const auto field = rasterize_obstacle(slit, inner, h);
  const int n = field.grid.n;
  REQUIRE(n == 17);
  std::size_t expected = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = -rho + i * h, y = -rho + j * h;
      const bool near = oracle::distance_to_segment(x, y, -rho / 2.0, rho / 2.0) <= h / 2.0;
      expected += near;
      CHECK(static_cast<bool>(field.values[static_cast<std::size_t>(j * n + i)]) == near);
    }
  }
  CHECK(field.count() == expected);
  CHECK(expected == 9);
}

TEST_CASE("rasterize: custom mask is a union of closed boxes") {
  const auto mask = DomainSpec::custom_mask(Point(0.0, 0.0), {Cube(Point(0.25, 0.25), 0.25), Cube(Point(-0.5, -0.5), 0.25)});
  const auto field = rasterize_obstacle(mask, Cube(Point(0.0, 0.0), 1.0), 0.25);
  // 3x3 nodes per box on the 9x9 lattice, no overlap.
  CHECK(field.count() == 18);
}

TEST_CASE("distance to complement") {
  const auto half = DomainSpec::half_space(Point(0.0, 0.0));
  CHECK(half.distance_to_complement(Point(-0.3, 5.0)) == doctest::Approx(0.3));
  CHECK(half.distance_to_complement(Point(0.3, 5.0)) == 0.0);
  const auto slit = DomainSpec::slit(Point(0.0, 0.0), 1.0);
  CHECK(slit.distance_to_complement(Point(-0.3, 0.4)) == doctest::Approx(0.5));
  CHECK(slit.distance_to_complement(Point(0.5, -0.2)) == doctest::Approx(0.2));
}
