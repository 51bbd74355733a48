#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "singelliptic/grid.hpp"
#include "singelliptic/model.hpp"
#include "singelliptic/solver.hpp"

using namespace singelliptic;

namespace {

// f(x) = 2x(1-x) tabulated densely enough that interpolation bias is far
// below the discretization error of every mesh used here.
SourceSpec parabola_source() {
  const int res = 8192;
  std::vector<double> samples(res + 1);
  for (int i = 0; i <= res; ++i) {
    const double x = static_cast<double>(i) / res;
    samples[i] = 2.0 * x * (1.0 - x);
  }
  return SourceSpec::tabulated(std::move(samples), res);
}

ProblemSpec manufactured_spec() {
  ProblemSpec s;
  s.p = 2.0;
  s.theta = 0.0;
  s.alpha = 1.0;
  s.gamma = 1.0;
  s.C = 1.0;
  s.dim = 1;
  s.extents = {1.0, 1.0};
  s.source = parabola_source();
  return s;
}

// Max defect against x(1-x) over nodes and element midpoints.
double manufactured_error(const DiscreteField& u) {
  const Mesh& mesh = *u.mesh;
  double err = 0.0;
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    const double x = mesh.nodes[i][0];
    err = std::max(err, std::abs(u.values[i] - x * (1.0 - x)));
  }
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double xm = 0.5 * (mesh.nodes[cell[0]][0] + mesh.nodes[cell[1]][0]);
    const double um = 0.5 * (u.values[cell[0]] + u.values[cell[1]]);
    err = std::max(err, std::abs(um - xm * (1.0 - xm)));
  }
  return err;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("doubling schedule layout and validation") {
  const auto sched = RegularizationSchedule::doubling(4);
  REQUIRE(sched.n_values.size() == 5);
  CHECK(sched.n_values.front() == 1.0);
  CHECK(sched.n_values.back() == 16.0);
  for (std::size_t k = 1; k < sched.n_values.size(); ++k)
    CHECK(sched.n_values[k] == 2.0 * sched.n_values[k - 1]);
  sched.validate();

  RegularizationSchedule bad;
  bad.n_values = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.n_values = {1.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.n_values = {-1.0, 2.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.n_values = {1.0, 2.0};
  bad.outer_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("manufactured problem: second-order accuracy and clean history") {
  const ProblemSpec s = manufactured_spec();
  auto mesh = build_mesh(1, s.extents, 64);
  const auto res = solve_singular(s, mesh, RegularizationSchedule::doubling(14),
                                  NewtonConfig{});
  REQUIRE(res.converged);
  CHECK(!res.non_contractive);
  const double err = manufactured_error(res.field);
  CHECK(err <= 1e-3);
  CHECK(err >= 1e-6);  // sanity: not accidentally exact
  CHECK(err == doctest::Approx(5.8827e-5).epsilon(0.05));

  // All nodal values in [0, 1/4 + eps]; boundary exactly zero.
  CHECK(res.field.values.front() == 0.0);
  CHECK(res.field.values.back() == 0.0);
  for (double v : res.field.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 0.2501);
  }

  // Increments decrease monotonically once the early transient has passed.
  for (std::size_t k = 3; k < res.increments.size(); ++k)
    CHECK(res.increments[k] <= res.increments[k - 1] * (1.0 + 1e-12));

  // Bookkeeping shapes agree.
  CHECK(res.n_values.size() == res.newton_iters.size());
  CHECK(res.n_values.size() == res.residuals.size());
  CHECK(res.increments.size() + 1 == res.n_values.size());
  CHECK(res.residual <= 1e-9);
}

TEST_CASE("manufactured problem: error contracts by about 4 per refinement") {
  const ProblemSpec s = manufactured_spec();
  double prev = 0.0;
  for (int res : {64, 128, 256}) {
    auto mesh = build_mesh(1, s.extents, res);
    const auto sol = solve_singular(
        s, mesh, RegularizationSchedule::doubling(14), NewtonConfig{});
    REQUIRE(sol.converged);
    const double err = manufactured_error(sol.field);
    if (prev > 0.0) {
      const double ratio = prev / err;
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
    prev = err;
  }
}

TEST_CASE("zero source yields the zero solution immediately") {
  ProblemSpec s = manufactured_spec();
  s.source = SourceSpec::constant(0.0);
  auto mesh = build_mesh(1, s.extents, 32);
  const auto res = solve_singular(s, mesh, RegularizationSchedule::doubling(6),
                                  NewtonConfig{});
  CHECK(res.converged);
  CHECK(res.n_values.size() == 2);  // converges at the first increment
  for (double v : res.field.values) CHECK(v == 0.0);
  CHECK(res.increments.front() == 0.0);
}

TEST_CASE("single-stage schedules cannot certify convergence") {
  ProblemSpec s = manufactured_spec();
  s.source = SourceSpec::constant(1.0);
  auto mesh = build_mesh(1, s.extents, 16);
  RegularizationSchedule sched;
  sched.n_values = {4.0};
  const auto res = solve_singular(s, mesh, sched, NewtonConfig{});
  CHECK(!res.converged);  // no increment was ever measured
  CHECK(res.increments.empty());
  CHECK(res.n_values.size() == 1);
}

TEST_CASE("deterministic: identical runs produce bit-identical fields") {
  const ProblemSpec s = manufactured_spec();
  auto mesh = build_mesh(1, s.extents, 48);
  const auto a = solve_singular(s, mesh, RegularizationSchedule::doubling(12),
                                NewtonConfig{});
  const auto b = solve_singular(s, mesh, RegularizationSchedule::doubling(12),
                                NewtonConfig{});
  REQUIRE(a.field.values.size() == b.field.values.size());
  CHECK(std::memcmp(a.field.values.data(), b.field.values.data(),
                    a.field.values.size() * sizeof(double)) == 0);
  REQUIRE(a.increments.size() == b.increments.size());
  for (std::size_t k = 0; k < a.increments.size(); ++k)
    CHECK(a.increments[k] == b.increments[k]);
}

TEST_CASE("warm and cold starts agree at the same truncation level") {
  ProblemSpec s = manufactured_spec();
  s.source = SourceSpec::constant(1.0);
  s.gamma = 0.5;
  auto mesh = build_mesh(1, s.extents, 32);

  RegularizationSchedule warm;
  warm.n_values = {1.0, 2.0, 4.0};
  warm.outer_tol = 1e-30;  // never stop early
  const auto w = solve_singular(s, mesh, warm, NewtonConfig{});

  RegularizationSchedule cold;
  cold.n_values = {4.0};
  const auto c = solve_singular(s, mesh, cold, NewtonConfig{});

  double maxdiff = 0.0;
  for (std::size_t i = 0; i < w.field.values.size(); ++i)
    maxdiff = std::max(maxdiff,
                       std::abs(w.field.values[i] - c.field.values[i]));
  CHECK(maxdiff <= 1e-8);
}

TEST_CASE("residual evaluation is small at solutions and large away from them") {
  ProblemSpec s = manufactured_spec();
  s.source = SourceSpec::constant(1.0);
  auto mesh = build_mesh(1, s.extents, 32);
  RegularizationSchedule sched;
  sched.n_values = {1.0, 2.0, 4.0, 8.0};
  sched.outer_tol = 1e-30;
  const auto res = solve_singular(s, mesh, sched, NewtonConfig{});
  CHECK(residual_of(s, *mesh, 8.0, res.field) <= 1e-9);

  DiscreteField off = res.field;
  for (std::size_t i = 0; i < off.values.size(); ++i)
    if (!mesh->boundary[i]) off.values[i] += 0.01;
  CHECK(residual_of(s, *mesh, 8.0, off) > 1e-4);
}

TEST_CASE("newton reports divergence when starved of iterations") {
  ProblemSpec s = manufactured_spec();
  s.source = SourceSpec::constant(1.0);
  s.gamma = 0.5;
  auto mesh = build_mesh(1, s.extents, 16);
  NewtonConfig starved;
  starved.max_iter = 1;
  DiscreteField zero(mesh);
  bool threw = false;
  try {
    solve_regularized(s, mesh, 16.0, zero, starved);
  } catch (const NewtonDivergence& e) {
    threw = true;
    CHECK(e.last_residual > 0.0);
  }
  CHECK(threw);
  // With enough iterations the same solve succeeds.
  NewtonConfig ok;
  const auto u = solve_regularized(s, mesh, 16.0, zero, ok);
  CHECK(residual_of(s, *mesh, 16.0, u) <= 1e-9);
}

TEST_CASE("critical-regime stall is flagged as non-contractive") {
  ProblemSpec s;
  s.p = 2.0;
  s.theta = 1.0;
  s.gamma = 2.0;  // = theta(p-1)+1
  s.dim = 1;
  s.source = SourceSpec::constant(1.0, 1.0);
  auto mesh = build_mesh(1, s.extents, 64);
  const auto res = solve_singular(s, mesh, RegularizationSchedule::doubling(14),
                                  NewtonConfig{});
  CHECK(!res.converged);
  CHECK(res.non_contractive);
  // The flag must correspond to an actual late increase.
  bool increase = false;
  for (std::size_t k = 3; k < res.increments.size(); ++k)
    if (res.increments[k] > res.increments[k - 1] * (1.0 + 1e-12))
      increase = true;
  CHECK(increase);
}

TEST_CASE("two-dimensional solve converges and stays within the sup bound") {
  ProblemSpec s;
  s.dim = 2;
  s.p = 1.5;
  s.theta = 1.0;
  s.gamma = 0.5;
  s.extents = {6.0, 6.0};
  s.source = SourceSpec::constant(1.0, 10.0);
  auto mesh = build_mesh(2, s.extents, 16);
  const auto res = solve_singular(s, mesh, RegularizationSchedule::doubling(12),
                                  NewtonConfig{});
  REQUIRE(res.converged);
  CHECK(!res.non_contractive);
  double mx = 0.0;
  for (double v : res.field.values) {
    CHECK(v >= 0.0);
    mx = std::max(mx, v);
  }
  CHECK(mx > 0.1);   // genuinely nontrivial
  CHECK(mx < 45.0);  // far below the theta=1 sup bound at this size
}

TEST_CASE("degenerate flux (p < 2) solves without regularization artifacts") {
  ProblemSpec s;
  s.dim = 1;
  s.p = 1.5;
  s.theta = 0.0;
  s.gamma = 0.5;
  s.source = SourceSpec::constant(1.0);
  auto mesh = build_mesh(1, s.extents, 32);
  const auto res = solve_singular(s, mesh, RegularizationSchedule::doubling(12),
                                  NewtonConfig{});
  REQUIRE(res.converged);
  for (double v : res.field.values) CHECK(std::isfinite(v));
  // The defect-free residual (no flux smoothing) is still tiny.
  CHECK(residual_of(s, *mesh, res.n_values.back(), res.field) <= 1e-8);
}

TEST_CASE("mesh self-convergence against a strongly refined reference") {
  ProblemSpec s;
  s.p = 2.0;
  s.theta = 1.0;
  s.gamma = 0.5;
  s.dim = 1;
  s.source = SourceSpec::constant(1.0);
  auto coarse = build_mesh(1, s.extents, 64);
  auto fine = build_mesh(1, s.extents, 4096);
  const auto uc = solve_singular(s, coarse,
                                 RegularizationSchedule::doubling(14),
                                 NewtonConfig{});
  const auto uf = solve_singular(s, fine,
                                 RegularizationSchedule::doubling(14),
                                 NewtonConfig{});
  REQUIRE(uc.converged);
  REQUIRE(uf.converged);
  // Compare at the coarse nodes (every 64th fine node).
  double maxdiff = 0.0;
  for (std::size_t i = 0; i < uc.field.values.size(); ++i)
    maxdiff = std::max(maxdiff, std::abs(uc.field.values[i] -
                                         uf.field.values[i * 64]));
  CHECK(maxdiff <= 1e-3);
  CHECK(maxdiff >= 1e-6);
  CHECK(maxdiff == doctest::Approx(3.68e-5).epsilon(0.2));
}

TEST_CASE("history fields trace the schedule") {
  const ProblemSpec s = manufactured_spec();
  auto mesh = build_mesh(1, s.extents, 32);
  const auto res = solve_singular(s, mesh, RegularizationSchedule::doubling(14),
                                  NewtonConfig{});
  REQUIRE(res.converged);
  REQUIRE(res.history_fields.size() == res.n_values.size());
  // The last history entry is the final field.
  const auto& last = res.history_fields.back();
  for (std::size_t i = 0; i < last.values.size(); ++i)
    CHECK(last.values[i] == res.field.values[i]);
  // Increments recompute from consecutive history fields.
  for (std::size_t k = 1; k < res.history_fields.size(); ++k) {
    const auto diff = field_difference(res.history_fields[k],
                                       res.history_fields[k - 1]);
    CHECK(lebesgue_norm(diff, s.p) ==
          doctest::Approx(res.increments[k - 1]).epsilon(1e-12));
  }
}

}  // TEST_SUITE
