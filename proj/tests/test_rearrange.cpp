#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "singelliptic/grid.hpp"
#include "singelliptic/rearrange.hpp"

using namespace singelliptic;

namespace {

double urand(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

DiscreteField random_field(std::mt19937_64& gen, int dim, int res, double lo,
                           double hi) {
  auto mesh = build_mesh(dim, {1.0, 1.0}, res);
  DiscreteField u(mesh);
  for (double& v : u.values) v = lo + (hi - lo) * urand(gen);
  return u;
}

// The canonical three-step profile: value 2 on measure 0.3, value 1 on
// measure 0.5, value 0 on measure 0.2. Constant pieces bridge the level gaps
// exactly as the field-based constructor would lay them out.
RearrangementProfile step_profile() {
  RearrangementProfile prof;
  prof.total_measure = 1.0;
  prof.max_value = 2.0;
  prof.support_measure = 0.8;
  RearrangementProfile::Piece lo{0.0, 1.0, 0.8, 0.8, 0.8};
  RearrangementProfile::Piece hi{1.0, 2.0, 0.3, 0.3, 0.3};
  prof.pieces = {lo, hi};
  prof.jumps = {{1.0, 0.5}, {2.0, 0.3}};
  return prof;
}

}  // namespace

TEST_SUITE("rearrange") {

TEST_CASE("unit ball volumes") {
  CHECK(GeometryConstants::unit_ball(1).C_N == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(GeometryConstants::unit_ball(2).C_N ==
        doctest::Approx(3.1415926535897932).epsilon(1e-15));
  CHECK(GeometryConstants::unit_ball(3).C_N ==
        doctest::Approx(4.188790204786391).epsilon(1e-15));
  CHECK(GeometryConstants::unit_ball(4).C_N ==
        doctest::Approx(4.9348022005446793).epsilon(1e-15));
}

TEST_CASE("distribution function of linear ramps is exact") {
  auto mesh1 = build_mesh(1, {1.0, 1.0}, 16);
  auto u1 = interpolate(mesh1, [](std::span<const double> x) { return x[0]; });
  for (double t : {0.0, 0.1, 0.33, 0.5, 0.99}) {
    CHECK(distribution_function(u1, t) ==
          doctest::Approx(1.0 - t).epsilon(1e-13));
  }
  CHECK(distribution_function(u1, 1.0) == doctest::Approx(0.0).epsilon(1e-13));

  auto mesh2 = build_mesh(2, {1.0, 1.0}, 12);
  auto u2 = interpolate(mesh2, [](std::span<const double> x) { return x[0]; });
  for (double t : {0.05, 0.25, 0.6, 0.875}) {
    CHECK(distribution_function(u2, t) ==
          doctest::Approx(1.0 - t).epsilon(1e-12));
  }

  // Negative parts count through the absolute value.
  auto w = interpolate(mesh1, [](std::span<const double> x) {
    return x[0] - 0.5;  // |w| <= 0.5, symmetric
  });
  for (double t : {0.1, 0.3}) {
    CHECK(distribution_function(w, t) ==
          doctest::Approx(1.0 - 2.0 * t).epsilon(1e-12));
  }
}

TEST_CASE("level sets have positive measure only on plateaus") {
  auto mesh = build_mesh(1, {1.0, 1.0}, 10);
  DiscreteField u(mesh);
  // Plateau at 0.7 over [0.3, 0.8]: nodes 3..8 (5 flat cells, measure 0.5).
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double x = mesh->nodes[i][0];
    u.values[i] = (x >= 0.3 - 1e-12 && x <= 0.8 + 1e-12) ? 0.7 : 0.0;
  }
  CHECK(level_set_measure(u, 0.7) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(level_set_measure(u, 0.35) == doctest::Approx(0.0).epsilon(1e-13));

  auto ramp = interpolate(mesh, [](std::span<const double> x) { return x[0]; });
  CHECK(level_set_measure(ramp, 0.5) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("rearrangement of the linear ramp inverts the distribution") {
  auto mesh = build_mesh(1, {1.0, 1.0}, 32);
  auto u = interpolate(mesh, [](std::span<const double> x) { return x[0]; });
  const auto prof = decreasing_rearrangement(u);
  CHECK(prof.total_measure == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prof.max_value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prof.support_measure == doctest::Approx(1.0).epsilon(1e-13));
  for (double t : {0.0, 0.2, 0.45, 0.7, 0.95}) {
    CHECK(prof.mu(t) == doctest::Approx(1.0 - t).epsilon(1e-12));
  }
  for (double s : {0.01, 0.2, 0.5, 0.8, 0.99}) {
    CHECK(prof.ustar(s) == doctest::Approx(1.0 - s).epsilon(1e-10));
  }
  CHECK(prof.ustar(1.0) == 0.0);
  CHECK(prof.ustar(2.0) == 0.0);
}

TEST_CASE("constant fields become a single plateau") {
  auto mesh = build_mesh(2, {1.0, 1.0}, 5);
  DiscreteField u(mesh);
  std::fill(u.values.begin(), u.values.end(), 0.75);
  const auto prof = decreasing_rearrangement(u);
  CHECK(prof.support_measure == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(prof.max_value == 0.75);
  REQUIRE(prof.jumps.size() == 1);
  CHECK(prof.jumps[0].first == 0.75);
  CHECK(prof.jumps[0].second == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(prof.ustar(0.5) == 0.75);
  CHECK(prof.mu(0.5) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(prof.mu(0.75) == 0.0);
  // Equimeasurability with phi(t) = t^2 on the plateau: both sides 0.5625.
  const auto [mesh_side, prof_side] = equimeasurability_power(u, 2.0);
  CHECK(mesh_side == doctest::Approx(0.5625).epsilon(1e-13));
  CHECK(prof_side == doctest::Approx(0.5625).epsilon(1e-13));
}

TEST_CASE("three-step profile reproduces the hand values exactly") {
  const auto prof = step_profile();
  CHECK(prof.mu(0.5) == 0.8);
  CHECK(prof.mu(1.5) == 0.3);
  CHECK(prof.mu(2.0) == 0.0);
  CHECK(prof.ustar(0.1) == 2.0);
  CHECK(prof.ustar(0.3) == 1.0);  // right-continuous at the jump gap
  CHECK(prof.ustar(0.5) == 1.0);
  CHECK(prof.ustar(0.8) == 0.0);
  CHECK(prof.ustar(0.95) == 0.0);
  // Stieltjes integral of the identity: 2*0.3 + 1*0.5 = 1.1 exactly.
  const double integral = prof.stieltjes([](double t) { return t; });
  CHECK(integral == 1.1);
  // And of t^2: 4*0.3 + 1*0.5 = 1.7.
  CHECK(prof.stieltjes([](double t) { return t * t; }) ==
        doctest::Approx(1.7).epsilon(1e-15));
}

TEST_CASE("rearrangement is monotone-equivariant under positive scaling") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    auto u = random_field(gen, dim, dim == 1 ? 24 : 10, 0.1, 1.0);
    DiscreteField cu = u;
    const double c = 3.25;
    for (double& v : cu.values) v *= c;
    const auto pu = decreasing_rearrangement(u);
    const auto pc = decreasing_rearrangement(cu);
    CHECK(pc.max_value == doctest::Approx(c * pu.max_value).epsilon(1e-13));
    for (int k = 0; k <= 20; ++k) {
      const double s = pu.total_measure * k / 20.0;
      CHECK(pc.ustar(s) == doctest::Approx(c * pu.ustar(s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("u*(mu(t)) never exceeds t") {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    const int res = dim == 1 ? 16 + static_cast<int>(urand(gen) * 32)
                             : 6 + static_cast<int>(urand(gen) * 10);
    auto u = random_field(gen, dim, res, 0.0, 1.0);
    const auto prof = decreasing_rearrangement(u);
    for (int k = 0; k < 50; ++k) {
      const double t = prof.max_value * k / 49.0;
      CHECK(prof.ustar(prof.mu(t)) <= t + 1e-12);
    }
  }
}

TEST_CASE("mu from the profile matches the direct level-set measure") {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    auto u = random_field(gen, dim, dim == 1 ? 20 : 8, 0.0, 2.0);
    const auto prof = decreasing_rearrangement(u);
    for (int k = 0; k < 25; ++k) {
      const double t = prof.max_value * (k + 0.31) / 25.0;
      CHECK(prof.mu(t) ==
            doctest::Approx(distribution_function(u, t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("equimeasurability of power integrands") {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    const int res = dim == 1 ? 16 + static_cast<int>(urand(gen) * 32)
                             : 6 + static_cast<int>(urand(gen) * 10);
    auto u = random_field(gen, dim, res, 0.1, 1.0);
    for (double q : {1.0, 2.0, 1.5}) {
      const auto [mesh_side, prof_side] = equimeasurability_power(u, q);
      CHECK(std::abs(mesh_side - prof_side) <= 1e-10 * std::max(1.0, mesh_side));
    }
  }
  // Sign-changing fields rearrange |u|.
  auto mesh = build_mesh(1, {1.0, 1.0}, 25);
  auto w = interpolate(mesh, [](std::span<const double> x) {
    return x[0] - 0.4;
  });
  for (double q : {1.0, 2.0}) {
    const auto [mesh_side, prof_side] = equimeasurability_power(w, q);
    const double exact = (std::pow(0.4, q + 1.0) + std::pow(0.6, q + 1.0)) /
                         (q + 1.0);
    CHECK(mesh_side == doctest::Approx(exact).epsilon(1e-12));
    CHECK(prof_side == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK_THROWS_AS(equimeasurability_power(w, 0.5), std::domain_error);
}

TEST_CASE("equimeasurability with a general monotone map") {
  std::mt19937_64 gen(35);
  auto u = random_field(gen, 1, 40, 0.1, 1.0);
  const auto [a, b] =
      equimeasurability_check(u, [](double t) { return t * t; });
  const auto [pa, pb] = equimeasurability_power(u, 2.0);
  CHECK(a == doctest::Approx(pa).epsilon(1e-9));
  CHECK(b == doctest::Approx(pb).epsilon(1e-12));
  CHECK(std::abs(a - b) <= 1e-8);

  // phi must vanish at zero and be nondecreasing.
  CHECK_THROWS_AS(
      equimeasurability_check(u, [](double t) { return t + 1.0; }),
      std::domain_error);
  CHECK_THROWS_AS(
      equimeasurability_check(u, [](double t) { return -t; }),
      std::domain_error);
}

TEST_CASE("stieltjes handles the zero set explicitly") {
  // Support on half the domain: u = max(0, x - 0.5) on (0,1).
  auto mesh = build_mesh(1, {1.0, 1.0}, 20);
  auto u = interpolate(mesh, [](std::span<const double> x) {
    return std::max(0.0, x[0] - 0.5);
  });
  const auto prof = decreasing_rearrangement(u);
  CHECK(prof.support_measure == doctest::Approx(0.5).epsilon(1e-12));
  // integral of u* = integral of u = 1/8.
  CHECK(prof.stieltjes([](double t) { return t; }) ==
        doctest::Approx(0.125).epsilon(1e-10));
  // A map with phi(0) = 0 ignores the zero set; the measure of the zero set
  // still shows up through total - support.
  CHECK(prof.total_measure - prof.support_measure ==
        doctest::Approx(0.5).epsilon(1e-12));
}

}  // TEST_SUITE
