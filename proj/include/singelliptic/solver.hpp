#pragma once
// Damped-Newton solution of the truncated regularized problems and the outer
// regularization loop n -> infinity. The inner solve works on the interior
// nodal unknowns of a P1 mesh with exact sparse LU linear algebra; the outer
// loop doubles n, warm-starting each stage, and measures L^p Cauchy
// increments between consecutive stages.

#include <memory>
#include <stdexcept>
#include <vector>

#include "singelliptic/grid.hpp"
#include "singelliptic/model.hpp"

namespace singelliptic {

/// Outer schedule of truncation levels. Levels must be positive and strictly
/// increasing; `doubling(K)` yields 1, 2, 4, ..., 2^K. `max_outer` > 0 caps
/// the number of stages actually run (0 = run the whole list).
struct RegularizationSchedule {
  std::vector<double> n_values;
  double outer_tol = 1e-8;
  int max_outer = 0;

  static RegularizationSchedule doubling(int K, double tol = 1e-8);
  void validate() const;  // throws ConfigError on violations
};

/// Inner Newton parameters. `positivity_floor` is used only inside the
/// singular-source evaluation during iteration; the final residual is
/// reported without it.
struct NewtonConfig {
  double residual_tol = 1e-10;
  int max_iter = 100;
  double damping = 0.5;          // backtracking factor in (0,1)
  double positivity_floor = 1e-12;
};

/// Inner solver failed to reach the residual tolerance.
struct NewtonDivergence : std::runtime_error {
  double last_residual;
  explicit NewtonDivergence(double r);
};

/// The linearized system was numerically singular.
struct SingularJacobian : std::runtime_error {
  SingularJacobian();
};

/// Full outcome of the outer loop. `increments` holds the L^p distances
/// between consecutive stages (one fewer entry than stages, or equal when a
/// single stage is run and no increment exists -> empty). `non_contractive`
/// flags increments that grow again after the third one: a diagnostic, not
/// an error. `converged` means the last increment fell below `outer_tol` and
/// the final stage satisfied the inner residual tolerance.
struct SolveResult {
  DiscreteField field;
  std::vector<double> n_values;       // stages actually run
  std::vector<double> increments;     // ||u_{k} - u_{k-1}||_{L^p}
  std::vector<int> newton_iters;      // per stage
  std::vector<double> residuals;      // per stage, floor-free
  std::vector<DiscreteField> history_fields;  // per stage
  double residual = 0.0;              // final stage residual
  bool converged = false;
  bool non_contractive = false;
};

/// Solves one truncated problem at level n starting from `init` (which must
/// satisfy the boundary conditions). Returns a field with boundary values
/// exactly 0, interior residual <= cfg.residual_tol, and tiny negative nodal
/// values clipped to 0. Throws NewtonDivergence or SingularJacobian.
DiscreteField solve_regularized(const ProblemSpec& spec,
                                const std::shared_ptr<const Mesh>& mesh,
                                double n, const DiscreteField& init,
                                const NewtonConfig& cfg);

/// Runs the outer schedule: the first stage starts from the linear problem
/// with the singular factor replaced by the constant n, later stages warm
/// start from the previous solution. Stops early once an increment falls
/// below the outer tolerance.
SolveResult solve_singular(const ProblemSpec& spec,
                           const std::shared_ptr<const Mesh>& mesh,
                           const RegularizationSchedule& schedule,
                           const NewtonConfig& cfg);

/// Euclidean norm of the discrete weak-form residual of `u` at level n,
/// tested against all interior P1 basis functions, with no gradient
/// regularization and no positivity floor.
double residual_of(const ProblemSpec& spec, const Mesh& mesh, double n,
                   const DiscreteField& u);

}  // namespace singelliptic
