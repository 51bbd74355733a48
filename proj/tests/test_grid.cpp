#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "singelliptic/grid.hpp"
#include "singelliptic/model.hpp"

using namespace singelliptic;

namespace {
double urand(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }
}  // namespace

TEST_SUITE("grid") {

TEST_CASE("1D mesh shape and measures") {
  auto mesh = build_mesh(1, {2.0, 1.0}, 8);
  CHECK(mesh->dim == 1);
  CHECK(mesh->n_nodes() == 9);
  CHECK(mesh->n_cells() == 8);
  CHECK(mesh->h == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mesh->element_volume == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mesh->domain_measure() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mesh->n_interior == 7);
  int nb = 0;
  for (bool b : mesh->boundary) nb += b ? 1 : 0;
  CHECK(nb == 2);
  CHECK(mesh->boundary.front());
  CHECK(mesh->boundary.back());
  // Interior numbering is compact and skips the boundary.
  CHECK(mesh->interior_index[0] == -1);
  CHECK(mesh->interior_index[1] == 0);
  CHECK(mesh->interior_index[8] == -1);
  // 1D cells carry a -1 sentinel third vertex.
  CHECK(mesh->cells[0][2] == -1);
}

TEST_CASE("2D mesh shape, measures, and basis gradients") {
  const int res = 6;
  auto mesh = build_mesh(2, {3.0, 1.5}, res);
  CHECK(mesh->n_nodes() == static_cast<std::size_t>((res + 1) * (res + 1)));
  CHECK(mesh->n_cells() == static_cast<std::size_t>(2 * res * res));
  CHECK(mesh->domain_measure() == doctest::Approx(4.5).epsilon(1e-14));
  const double hx = 3.0 / res, hy = 1.5 / res;
  CHECK(mesh->element_volume == doctest::Approx(hx * hy / 2.0).epsilon(1e-14));
  CHECK(mesh->h >= std::max(hx, hy));
  int nb = 0;
  for (bool b : mesh->boundary) nb += b ? 1 : 0;
  CHECK(nb == 4 * res);
  CHECK(mesh->n_interior == static_cast<std::size_t>((res - 1) * (res - 1)));

  // Vertex basis gradients sum to zero on every cell, and cell areas tile
  // the domain.
  REQUIRE(mesh->cell_grads.size() == mesh->n_cells());
  for (std::size_t c = 0; c < mesh->n_cells(); ++c) {
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < 3; ++k) {
      gx += mesh->cell_grads[c][k][0];
      gy += mesh->cell_grads[c][k][1];
    }
    CHECK(std::abs(gx) <= 1e-13);
    CHECK(std::abs(gy) <= 1e-13);
  }
  CHECK(static_cast<double>(mesh->n_cells()) * mesh->element_volume ==
        doctest::Approx(4.5).epsilon(1e-13));
}

TEST_CASE("mesh construction rejects bad arguments") {
  CHECK_THROWS_AS(build_mesh(1, {1.0, 1.0}, 1), ConfigError);
  CHECK_THROWS_AS(build_mesh(3, {1.0, 1.0}, 4), ConfigError);
  CHECK_THROWS_AS(build_mesh(0, {1.0, 1.0}, 4), ConfigError);
}

TEST_CASE("interpolation and per-cell gradients reproduce linear functions") {
  auto mesh = build_mesh(2, {2.0, 1.0}, 5);
  auto u = interpolate(mesh, [](std::span<const double> x) {
    return 3.0 * x[0] + 2.0 * x[1] + 1.0;
  });
  for (std::size_t c = 0; c < mesh->n_cells(); ++c) {
    const auto g = cell_gradient(u, c);
    CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-12));
  }

  auto mesh1 = build_mesh(1, {1.0, 1.0}, 7);
  auto v = interpolate(mesh1, [](std::span<const double> x) {
    return 5.0 * x[0] - 2.0;
  });
  for (std::size_t c = 0; c < mesh1->n_cells(); ++c)
    CHECK(cell_gradient(v, c)[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("Lebesgue norms: closed forms, homogeneity, exponent nesting") {
  auto mesh = build_mesh(1, {1.0, 1.0}, 16);
  auto u = interpolate(mesh, [](std::span<const double> x) { return x[0]; });
  // The interpolant of x is exact, so ||u||_q = (q+1)^{-1/q} exactly.
  for (double q : {1.0, 2.0, 3.0, 4.0}) {
    CHECK(lebesgue_norm(u, q) ==
          doctest::Approx(std::pow(1.0 / (q + 1.0), 1.0 / q)).epsilon(1e-14));
  }
  CHECK(lebesgue_norm(u, std::numeric_limits<double>::infinity()) == 1.0);

  // Homogeneity ||c u||_q = |c| ||u||_q and monotone nesting
  // ||u||_q <= |Omega|^{1/q - 1/r} ||u||_r for q < r (here |Omega| = 1).
  DiscreteField cu = u;
  for (double& val : cu.values) val *= -2.5;
  for (double q : {1.0, 2.0, 2.5}) {
    CHECK(lebesgue_norm(cu, q) ==
          doctest::Approx(2.5 * lebesgue_norm(u, q)).epsilon(1e-12));
  }
  CHECK(lebesgue_norm(u, 1.0) <= lebesgue_norm(u, 2.0) + 1e-14);
  CHECK(lebesgue_norm(u, 2.0) <= lebesgue_norm(u, 3.0) + 1e-14);

  CHECK_THROWS_AS(lebesgue_norm(u, 0.5), std::domain_error);
}

TEST_CASE("fractional-power norms carry a quadrature error estimate") {
  auto mesh = build_mesh(1, {1.0, 1.0}, 32);
  auto u = interpolate(mesh, [](std::span<const double> x) { return x[0]; });
  // Integer powers use an exact rule: the estimate must be exactly zero.
  CHECK(lebesgue_norm_with_error(u, 2.0).quad_error_estimate == 0.0);
  CHECK(lebesgue_norm_with_error(u, 3.0).quad_error_estimate == 0.0);
  // Fractional powers: value close to the analytic norm, and the reported
  // estimate bounds the defect (with a small safety factor).
  const double q = 2.5;
  const auto nr = lebesgue_norm_with_error(u, q);
  const double exact = std::pow(1.0 / (q + 1.0), 1.0 / q);
  CHECK(std::abs(nr.value - exact) <= 10.0 * nr.quad_error_estimate + 1e-12);
  CHECK(nr.value == doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("2D norms of product fields") {
  auto mesh = build_mesh(2, {1.0, 1.0}, 24);
  auto u = interpolate(mesh, [](std::span<const double> x) {
    return x[0];
  });
  // ||x||_2 over the unit square = 1/sqrt(3); the interpolant is exact.
  CHECK(lebesgue_norm(u, 2.0) ==
        doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));
  CHECK(lebesgue_norm(u, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("Sobolev seminorm of linear fields is exact") {
  auto mesh1 = build_mesh(1, {1.0, 1.0}, 9);
  auto u1 = interpolate(mesh1, [](std::span<const double> x) { return x[0]; });
  for (double p : {1.5, 2.0, 3.0})
    CHECK(sobolev_seminorm(u1, p) == doctest::Approx(1.0).epsilon(1e-13));

  auto mesh2 = build_mesh(2, {1.0, 1.0}, 6);
  auto u2 = interpolate(mesh2, [](std::span<const double> x) {
    return x[0] + x[1];
  });
  for (double p : {1.5, 2.0}) {
    // |grad u| = sqrt(2) everywhere: seminorm = (2^{p/2})^{1/p} = sqrt(2).
    CHECK(sobolev_seminorm(u2, p) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(sobolev_seminorm(u1, 0.9), std::domain_error);
}

TEST_CASE("norm refinement: quadratic interpolation error decays at rate 4") {
  // || x(1-x) - I_h[x(1-x)] ||_inf halves twice per refinement.
  double prev = 0.0;
  for (int res : {8, 16, 32, 64}) {
    auto mesh = build_mesh(1, {1.0, 1.0}, res);
    auto u = interpolate(mesh, [](std::span<const double> x) {
      return x[0] * (1.0 - x[0]);
    });
    // Exact max interpolation defect on the midpoints: h^2/4.
    double maxdef = 0.0;
    for (std::size_t c = 0; c < mesh->n_cells(); ++c) {
      const auto& cell = mesh->cells[c];
      const double xm =
          0.5 * (mesh->nodes[cell[0]][0] + mesh->nodes[cell[1]][0]);
      const double um = 0.5 * (u.values[cell[0]] + u.values[cell[1]]);
      maxdef = std::max(maxdef, std::abs(um - xm * (1.0 - xm)));
    }
    const double h = 1.0 / res;
    CHECK(maxdef == doctest::Approx(h * h / 4.0).epsilon(1e-10));
    if (prev > 0.0) CHECK(prev / maxdef == doctest::Approx(4.0).epsilon(1e-8));
    prev = maxdef;
  }
}

TEST_CASE("field difference and mesh mismatch") {
  auto mesh = build_mesh(1, {1.0, 1.0}, 4);
  auto a = interpolate(mesh, [](std::span<const double> x) { return x[0]; });
  auto b = interpolate(mesh, [](std::span<const double>) { return 1.0; });
  auto d = field_difference(a, b);
  for (std::size_t i = 0; i < d.values.size(); ++i)
    CHECK(d.values[i] ==
          doctest::Approx(a.values[i] - 1.0).epsilon(1e-15));

  auto other = build_mesh(1, {1.0, 1.0}, 5);
  auto c = interpolate(other, [](std::span<const double>) { return 0.0; });
  CHECK_THROWS_AS(field_difference(a, c), std::invalid_argument);
}

TEST_CASE("nodal power transform") {
  auto mesh = build_mesh(1, {1.0, 1.0}, 4);
  DiscreteField u(mesh);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = static_cast<double>(i) * 0.5;
  auto sq = power_transform(u, 2.0);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    CHECK(sq.values[i] ==
          doctest::Approx(u.values[i] * u.values[i]).epsilon(1e-15));

  DiscreteField neg(mesh);
  neg.values[2] = -0.25;
  CHECK_THROWS_AS(power_transform(neg, 2.0), std::domain_error);
  CHECK_THROWS_AS(power_transform(u, 0.0), std::domain_error);
}

TEST_CASE("function norms over the mesh") {
  auto mesh = build_mesh(2, {2.0, 3.0}, 8);
  // Constant: ||1||_q = |Omega|^{1/q}.
  for (double q : {1.0, 2.0, 5.0}) {
    CHECK(function_lebesgue_norm(*mesh,
                                 [](std::span<const double>) { return 1.0; },
                                 q) ==
          doctest::Approx(std::pow(6.0, 1.0 / q)).epsilon(1e-12));
  }
  // Supremum convention.
  CHECK(function_lebesgue_norm(
            *mesh,
            [](std::span<const double> x) { return x[0] + x[1]; },
            std::numeric_limits<double>::infinity()) ==
        doctest::Approx(5.0).epsilon(1e-9));
  // Smooth nonconstant integrand against a closed form:
  // int_0^2 int_0^3 x^2 y dy dx = (8/3)*(9/2) = 12 -> L2 norm of x*sqrt(y).
  CHECK(function_lebesgue_norm(
            *mesh,
            [](std::span<const double> x) { return x[0] * std::sqrt(x[1]); },
            2.0) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-6));
}

TEST_CASE("random fields keep norms finite and ordered") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = trial % 2 == 0 ? 1 : 2;
    const int res = 4 + static_cast<int>(urand(gen) * 12);
    auto mesh = build_mesh(dim, {1.0, 1.0}, res);
    DiscreteField u(mesh);
    for (double& v : u.values) v = 2.0 * urand(gen) - 1.0;
    const double n1 = lebesgue_norm(u, 1.0);
    const double n2 = lebesgue_norm(u, 2.0);
    const double ninf = lebesgue_norm(u, std::numeric_limits<double>::infinity());
    CHECK(std::isfinite(n1));
    CHECK(n1 <= n2 + 1e-12);   // |Omega| = 1
    CHECK(n2 <= ninf + 1e-12);
  }
}

}  // TEST_SUITE
