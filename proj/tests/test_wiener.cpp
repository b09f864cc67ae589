#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pwiener/errors.hpp"
#include "pwiener/wiener.hpp"

using namespace pwiener;

namespace {

StructureParams params3() { return StructureParams::defaults(3.0, 2, 0.25); }

/// A_i drawn from [a_min, 1] with occasional dips; the sum diverges linearly.
std::vector<double> diverging_amplitudes(std::mt19937_64& rng, int depth) {
  std::uniform_real_distribution<double> level(0.05, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<double> A(static_cast<std::size_t>(depth));
  for (auto& a : A) a = coin(rng) < 0.2 ? 0.01 * level(rng) : level(rng);
  return A;
}

}  // namespace

TEST_CASE("profile radii follow the geometric grid") {
  const auto half = DomainSpec::half_space(Point(0.0, 0.0));
  CapacityConfig cfg;
  cfg.cells_per_radius = 8;
  const auto pr = build_profile(half, Point(0.0, 0.0), 1.0, 0.5, 3, params3(), cfg);
  REQUIRE(pr.depth() == 3);
  CHECK(pr.radius(0) == 1.0);
  CHECK(pr.radius(1) == 0.5);
  CHECK(pr.radius(2) == 0.25);
  for (const auto& e : pr.entries) CHECK(e.A == doctest::Approx(std::sqrt(e.delta)).epsilon(1e-14));
  CHECK_THROWS_AS(build_profile(DomainSpec::full_space(2), Point(0.0, 0.0), 1.0, 0.5, 3, params3(), cfg),
                  InvalidArgument);
}

TEST_CASE("exterior cube profile stays in a fixed band") {
  const auto dom = DomainSpec::exterior_cube(Cube(Point(0.5, 0.0), 0.5), Point(0.0, 0.0));
  CapacityConfig cfg;
  cfg.cells_per_radius = 16;
  const auto pr = build_profile(dom, Point(0.0, 0.0), 0.25, 0.5, 4, params3(), cfg);
  const double d0 = pr.entries[0].delta;
  CHECK(d0 > 0.1);
  for (const auto& e : pr.entries) {
    CHECK(e.delta <= 1.0);
    CHECK(std::abs(e.delta - d0) <= 0.05 * d0);
  }
}

TEST_CASE("wiener sums") {
  const double gamma_o = 0.36, p = 3.0, c_bar = 0.25;
  const auto pr = CapacityProfile::from_deltas(1.0, c_bar, p, std::vector<double>(6, gamma_o));
  for (int k = 1; k <= 6; ++k) {
    const double rho = std::pow(c_bar, k);
    CHECK(wiener_sum(pr, 0, k - 1) == doctest::Approx(std::sqrt(gamma_o) * std::log(1.0 / rho)).epsilon(1e-14));
    CHECK(wiener_integral(pr, rho) == doctest::Approx(std::sqrt(gamma_o) * std::log(1.0 / rho)).epsilon(1e-14));
  }
  CHECK(wiener_sum(pr, 3, 2) == 0.0);
  CHECK(wiener_integral(pr, 1.0) == 0.0);
  // Midway through a step the integrand is constant: A ln(rho_k / rho).
  CHECK(wiener_integral(pr, 0.125) == doctest::Approx(std::sqrt(gamma_o) * std::log(8.0)).epsilon(1e-14));
}

TEST_CASE("delta_i = rho_i^(p-1) gives a convergent series") {
  const double p = 3.0, c_bar = 0.5;
  std::vector<double> d;
  for (int i = 0; i < 12; ++i) d.push_back(std::pow(std::pow(c_bar, i) * 0.5, p - 1.0));
  const auto pr = CapacityProfile::from_deltas(0.5, c_bar, p, d);
  // A_i = rho_i, so the partial sums stay below ln 2 * R_o / (1 - c_bar).
  CHECK(wiener_sum(pr, 0, 11) < std::log(2.0) * 0.5 / (1.0 - c_bar));
  CHECK(is_wiener_point(pr, 8).verdict == WienerVerdict::converging);
}

TEST_CASE("wiener point diagnostic") {
  CHECK(is_wiener_point(CapacityProfile::from_deltas(1.0, 0.5, 3.0, std::vector<double>(8, 0.4)), 6).verdict ==
        WienerVerdict::diverging);
  std::vector<double> geo;
  for (int i = 0; i < 8; ++i) geo.push_back(std::ldexp(1.0, -i));
  const auto d = is_wiener_point(CapacityProfile::from_amplitudes(1.0, 0.5, 3.0, geo), 6);
  CHECK(d.verdict == WienerVerdict::converging);
  CHECK(d.tail_slope == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  int diverging = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> A;
    for (int i = 0; i < 12; ++i) A.push_back(0.5 * (1.0 + noise(rng)));
    diverging += is_wiener_point(CapacityProfile::from_amplitudes(1.0, 0.5, 3.0, A), 8).verdict ==
                 WienerVerdict::diverging;
  }
  CHECK(diverging == 100);
}

TEST_CASE("realised scale") {
  auto params = StructureParams::defaults(3.0, 2, 0.25);
  params.constants.gamma_star = 2.0;
  // 3 * 2 * 1 * R^(2.5) <= 6 at R = 1.
  const auto one = [](double) { return 1.0; };
  const auto rs = realize_R_o_epsilon(6.0, one, params, 0.5, 1.0, 4);
  CHECK(rs.R_o == 1.0);
  CHECK(rs.time_depth == doctest::Approx(6.0));
  CHECK(realize_R_o_epsilon(5.9, one, params, 0.5, 1.0, 4).R_o == 0.5);
  CHECK(realize_R_o_epsilon(1e12, one, params, 0.5, 0.75, 4).R_o == 0.75);
  const auto zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(realize_R_o_epsilon(1.0, zero, params, 0.5, 1.0, 4), NumericError);
}

TEST_CASE("choice of c_bar") {
  auto params = StructureParams::defaults(3.0, 2, 0.25);
  auto c = choose_c_bar(params);
  CHECK(c.lambda == 2);
  CHECK(c.c_bar == 0.25);
  CHECK(c_bar_inequality_holds(2, 3.0, 2.0));
  CHECK_FALSE(c_bar_inequality_holds(1, 3.0, 2.0));

  params.p = 4.0;
  params.constants.gamma_2 = 1e300;
  c = choose_c_bar(params);
  CHECK(c.lambda == 1);
  CHECK(c.c_bar == 0.5);

  for (double p : {2.2, 2.5, 3.0, 4.0, 6.0}) {
    int prev = 0;
    for (double g2 : {100.0, 10.0, 4.0, 2.0, 1.5, 1.1, 1.01}) {
      params.p = p;
      params.constants.gamma_2 = g2;
      const int lambda = choose_c_bar(params).lambda;
      CHECK(lambda == oracle::smallest_lambda(p, g2));
      CHECK(lambda >= prev);
      prev = lambda;
    }
  }
}

TEST_CASE("subsequence hand-walks") {
  const auto params = params3();
  auto s = build_subsequence(CapacityProfile::from_amplitudes(1.0, 0.25, 3.0, std::vector<double>(6, 1.0)), params);
  CHECK(s.indices == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK_FALSE(s.truncated);

  std::vector<double> geo;
  for (int i = 0; i < 6; ++i) geo.push_back(std::ldexp(1.0, -i));
  s = build_subsequence(CapacityProfile::from_amplitudes(1.0, 0.25, 3.0, geo), params);
  CHECK(s.indices == std::vector<int>{0});
  CHECK(s.truncated);
  CHECK(s.truncated_at == 0);

  s = build_subsequence(CapacityProfile::from_amplitudes(1.0, 0.25, 3.0, {1.0, 0.1, 1.0, 1.0}), params);
  CHECK(s.indices == std::vector<int>{0, 2, 3});

  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto A = diverging_amplitudes(rng, 30);
    CHECK(build_subsequence(CapacityProfile::from_amplitudes(1.0, 0.25, 3.0, A), params).indices ==
          oracle::subsequence(A));
  }
}

TEST_CASE("halving cascade and first cylinder") {
  const auto params = params3();
  const auto pr = CapacityProfile::from_deltas(1.0, 0.25, 3.0, std::vector<double>(5, 1.0));
  const auto r = oscillation_cascade(1.0, pr, params);
  REQUIRE(r.mu_seq.size() == 6);
  for (std::size_t j = 0; j < r.mu_seq.size(); ++j) CHECK(r.mu_seq[j] == std::ldexp(1.0, -static_cast<int>(j)));
  REQUIRE_FALSE(r.cylinders.empty());
  CHECK(r.cylinders[0].theta_bar == doctest::Approx(1.0));
  CHECK(r.cylinders[0].time_depth == doctest::Approx(2.0));
  CHECK(r.bar_c_all);
  CHECK(r.sub_bd_all);
  CHECK(r.bound_chain_all);
}

TEST_CASE("nesting and sub-bound over 100 seeded diverging profiles") {
  const double p = 3.0;
  auto params = StructureParams::defaults(p, 2, 0.25);
  const auto cb = choose_c_bar(params);
  params.derive(cb.c_bar);
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 100; ++trial) {
    const auto A = diverging_amplitudes(rng, 40);
    const auto pr = CapacityProfile::from_amplitudes(1.0, cb.c_bar, p, A);
    const auto r = oscillation_cascade(1.0, pr, params);
    CHECK(r.bar_c_all);
    CHECK(r.sub_bd_all);

    // Independent recomputation in long double.
    const auto idx = oracle::subsequence(A);
    std::vector<long double> mu{1.0L};
    for (int i : idx) mu.push_back(mu.back() * (1.0L - A[static_cast<std::size_t>(i)] / 2.0L));
    const auto rho = [&](int i) { return std::pow(static_cast<long double>(cb.c_bar), i); };
    for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
      const long double lhs = 3.0L * std::pow(mu[j + 1] * A[static_cast<std::size_t>(idx[j + 1])], 2.0L - p) *
                              std::pow(rho(idx[j + 1]), p);
      const long double rhs = std::pow(mu[j] * A[static_cast<std::size_t>(idx[j])], 2.0L - p) * std::pow(rho(idx[j]), p);
      CHECK(lhs <= rhs * (1.0L + 1e-12L));
    }
    long double all = 0.0L, picked = 0.0L;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      picked += A[static_cast<std::size_t>(idx[k])];
      const int stop = k + 1 < idx.size() ? idx[k + 1] : static_cast<int>(A.size());
      for (int i = idx[k]; i < stop; ++i) all += A[static_cast<std::size_t>(i)];
      CHECK(all <= 2.0L * picked * (1.0L + 1e-12L));
    }
  }
}

TEST_CASE("cascade guards") {
  const auto params = params3();
  CHECK_THROWS(oscillation_cascade(0.0, CapacityProfile::from_deltas(1.0, 0.25, 3.0, {1.0, 1.0}), params));
  CHECK_THROWS(build_subsequence(CapacityProfile::from_amplitudes(1.0, 0.25, 3.0, {0.0, 1.0}), params));
  // Large mu_o on a small R_o violates the initial scale requirement.
  const auto r = oscillation_cascade(1e-3, CapacityProfile::from_deltas(0.5, 0.25, 3.0, {1.0, 1.0, 1.0}), params, 0.5);
  CHECK_FALSE(r.in_req_holds);
  CHECK(r.power_law_branch);
  CHECK(r.power_law_bound == doctest::Approx(std::pow(0.5, 0.5)));
}

TEST_CASE("decay envelope and the Holder specialisation") {
  const double p = 3.0, gamma_o = 0.49, c_bar = 0.5;
  auto params = StructureParams::defaults(p, 2, c_bar);
  params.constants.gamma = 0.5;
  const auto pr = CapacityProfile::from_deltas(1.0, c_bar, p, std::vector<double>(10, gamma_o));
  EnvelopeParams env{1.0, 0.0, 0.5, 1.0, params};
  env.params.constants.bar_gamma = 0.0;
  const double alpha = holder_exponent(gamma_o, params);
  CHECK(alpha == doctest::Approx(0.5 * 0.7).epsilon(1e-15));
  std::vector<double> x, y;
  for (int k = 1; k < 10; ++k) {
    const double rho = std::ldexp(1.0, -k);
    const double v = decay_envelope(env, pr, rho);
    CHECK(std::abs(v - std::pow(rho, alpha)) <= 1e-12);
    x.push_back(std::log(rho));
    y.push_back(std::log(v));
  }
  const auto fit = oracle::least_squares(x, y);
  CHECK(std::abs(fit.slope - alpha) <= 1e-12);
  CHECK(std::abs(fit.correlation - 1.0) <= 1e-12);

  // Tail terms.
  env.osc_g = 0.1;
  env.params.constants.bar_gamma = 1.0;
  CHECK(decay_envelope(env, pr, 0.5) == doctest::Approx(std::pow(0.5, alpha) + 0.1 + 1.0).epsilon(1e-12));
  CHECK(decay_envelope(env, pr, 1.0 - 1e-12) == doctest::Approx(2.1).epsilon(1e-9));
  double prev = decay_envelope(env, pr, 0.99);
  for (double rho = 0.9; rho > 2e-3; rho *= 0.8) {
    const double v = decay_envelope(env, pr, rho);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(holder_exponent(1.0, params) == 0.5);
  CHECK(holder_exponent(0.2, params) < holder_exponent(0.3, params));
  CHECK_THROWS(holder_exponent(0.0, params));
}
