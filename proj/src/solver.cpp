#include "singelliptic/solver.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "singelliptic/quadrature.hpp"

namespace singelliptic {

RegularizationSchedule RegularizationSchedule::doubling(int K, double tol) {
  RegularizationSchedule s;
  s.outer_tol = tol;
  double n = 1.0;
  for (int k = 0; k <= K; ++k) {
    s.n_values.push_back(n);
    n *= 2.0;
  }
  return s;
}

void RegularizationSchedule::validate() const {
  if (n_values.empty())
    throw ConfigError("schedule must contain at least one truncation level");
  double prev = 0.0;
  for (double n : n_values) {
    if (!(n > prev))
      throw ConfigError(
          "schedule levels must be positive and strictly increasing");
    prev = n;
  }
  if (!(outer_tol > 0.0)) throw ConfigError("outer_tol must be positive");
  if (max_outer < 0) throw ConfigError("max_outer must be nonnegative");
}

NewtonDivergence::NewtonDivergence(double r)
    : std::runtime_error("inner iteration failed to reach the residual tolerance"),
      last_residual(r) {}

SingularJacobian::SingularJacobian()
    : std::runtime_error("linearized system is numerically singular") {}

namespace {

using Triplet = Eigen::Triplet<double>;

/// Per-solve immutable data: quadrature layout and raw source samples.
struct AssemblyContext {
  const ProblemSpec& spec;
  const Mesh& mesh;
  double n;
  int nv;                                     // local nodes per cell
  std::vector<double> qw;                     // weights summing to 1
  std::vector<std::array<double, 3>> qbasis;  // basis values per point
  std::vector<double> f_at_q;                 // raw f, cell-major
  double inv_h1d = 0.0;

  AssemblyContext(const ProblemSpec& s, const Mesh& m, double level)
      : spec(s), mesh(m), n(level) {
    if (mesh.dim == 1) {
      nv = 2;
      const GaussRule& g = gauss_legendre_01(5);
      qw = g.weights;
      qbasis.reserve(g.points.size());
      for (double x : g.points) qbasis.push_back({1.0 - x, x, 0.0});
      inv_h1d = 1.0 / mesh.element_volume;
    } else {
      nv = 3;
      const TriangleRule& tr = triangle_rule_degree5();
      qw = tr.weights;
      qbasis.reserve(tr.bary.size());
      for (const auto& b : tr.bary) qbasis.push_back({b[0], b[1], b[2]});
    }
    f_at_q.resize(mesh.n_cells() * qw.size());
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      for (std::size_t q = 0; q < qw.size(); ++q) {
        std::array<double, 2> x{0.0, 0.0};
        for (int k = 0; k < nv; ++k) {
          const auto& node = mesh.nodes[static_cast<std::size_t>(cell[k])];
          x[0] += qbasis[q][static_cast<std::size_t>(k)] * node[0];
          x[1] += qbasis[q][static_cast<std::size_t>(k)] * node[1];
        }
        f_at_q[c * qw.size() + q] = spec.source_at(
            std::span<const double>(x.data(), static_cast<std::size_t>(mesh.dim)));
      }
    }
  }

  std::array<double, 2> grad_phi(std::size_t c, int k) const {
    if (mesh.dim == 1)
      return k == 0 ? std::array<double, 2>{-inv_h1d, 0.0}
                    : std::array<double, 2>{inv_h1d, 0.0};
    return mesh.cell_grads[c][static_cast<std::size_t>(k)];
  }
};

/// Assembles the interior weak-form residual (if F) and/or the Newton
/// Jacobian triplets (if trips) at the nodal state `uvals`. `floor_eps` > 0
/// evaluates the singular factor at max(u, floor_eps); `delta` regularizes
/// the gradient norm inside the flux.
void assemble(const AssemblyContext& ctx, const std::vector<double>& uvals,
              double floor_eps, double delta, Eigen::VectorXd* F,
              std::vector<Triplet>* trips) {
  const Mesh& mesh = ctx.mesh;
  const ProblemSpec& spec = ctx.spec;
  const double p = spec.p;
  const double vol = mesh.element_volume;
  const double d2 = delta * delta;
  if (F) F->setZero(static_cast<Eigen::Index>(mesh.n_interior));
  const std::size_t nq = ctx.qw.size();

  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    std::array<std::array<double, 2>, 3> gphi{};
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < ctx.nv; ++k) {
      gphi[static_cast<std::size_t>(k)] = ctx.grad_phi(c, k);
      const double uk = uvals[static_cast<std::size_t>(cell[k])];
      gx += gphi[static_cast<std::size_t>(k)][0] * uk;
      gy += gphi[static_cast<std::size_t>(k)][1] * uk;
    }
    const double s2 = gx * gx + gy * gy + d2;
    double acoef, bcoef;
    if (s2 == 0.0) {
      acoef = p == 2.0 ? 1.0 : 0.0;
      bcoef = 0.0;
    } else {
      acoef = std::pow(s2, 0.5 * p - 1.0);
      bcoef = (p - 2.0) * std::pow(s2, 0.5 * p - 2.0);
    }
    const double psix = acoef * gx, psiy = acoef * gy;

    for (std::size_t q = 0; q < nq; ++q) {
      const double w = ctx.qw[q] * vol;
      double uq = 0.0;
      for (int k = 0; k < ctx.nv; ++k)
        uq += ctx.qbasis[q][static_cast<std::size_t>(k)] *
              uvals[static_cast<std::size_t>(cell[k])];
      const double tq = truncate_T(ctx.n, uq);
      const double babs = std::abs(tq);
      const double bq = coercivity_b(spec, babs);
      const double fq = truncate_T(ctx.n, ctx.f_at_q[c * nq + q]);
      const double ueval = floor_eps > 0.0 ? std::max(uq, floor_eps) : uq;
      const double hq = regularized_h(spec, ctx.n, ueval);

      if (F) {
        for (int i = 0; i < ctx.nv; ++i) {
          const int gi = mesh.interior_index[static_cast<std::size_t>(cell[i])];
          if (gi < 0) continue;
          const auto& gi_phi = gphi[static_cast<std::size_t>(i)];
          const double fluxdot = bq * (psix * gi_phi[0] + psiy * gi_phi[1]);
          (*F)(gi) += w * (fluxdot -
                           fq * hq * ctx.qbasis[q][static_cast<std::size_t>(i)]);
        }
      }
      if (trips) {
        const double dbq =
            coercivity_b_derivative(spec.alpha, spec.theta, p, babs);
        const double sg = uq >= 0.0 ? 1.0 : -1.0;
        const double dtq = truncate_T_derivative(ctx.n, uq);
        const double dhq = regularized_h_derivative(spec, ctx.n, ueval);
        for (int i = 0; i < ctx.nv; ++i) {
          const int gi = mesh.interior_index[static_cast<std::size_t>(cell[i])];
          if (gi < 0) continue;
          const auto& gpi = gphi[static_cast<std::size_t>(i)];
          const double psidot = psix * gpi[0] + psiy * gpi[1];
          const double gdoti = gx * gpi[0] + gy * gpi[1];
          for (int j = 0; j < ctx.nv; ++j) {
            const int gj =
                mesh.interior_index[static_cast<std::size_t>(cell[j])];
            if (gj < 0) continue;
            const auto& gpj = gphi[static_cast<std::size_t>(j)];
            const double phij = ctx.qbasis[q][static_cast<std::size_t>(j)];
            const double gradgrad = gpj[0] * gpi[0] + gpj[1] * gpi[1];
            const double gdotj = gx * gpj[0] + gy * gpj[1];
            const double t1 = bq * (acoef * gradgrad + bcoef * gdotj * gdoti);
            const double t2 = dbq * sg * dtq * phij * psidot;
            const double t3 = -fq * dhq * phij *
                              ctx.qbasis[q][static_cast<std::size_t>(i)];
            trips->emplace_back(gi, gj, w * (t1 + t2 + t3));
          }
        }
      }
    }
  }
}

/// Frozen-coefficient (Picard) system at `uvals`: linear diffusion with the
/// current coefficient b(|T_n(u)|) (|grad u|^2 + delta^2)^{(p-2)/2} and the
/// current source f_n h_n(u) on the right-hand side.
void assemble_picard(const AssemblyContext& ctx, const std::vector<double>& uvals,
                     double floor_eps, double delta, std::vector<Triplet>* trips,
                     Eigen::VectorXd* rhs) {
  const Mesh& mesh = ctx.mesh;
  const ProblemSpec& spec = ctx.spec;
  const double vol = mesh.element_volume;
  const double d2 = delta * delta;
  rhs->setZero(static_cast<Eigen::Index>(mesh.n_interior));
  const std::size_t nq = ctx.qw.size();

  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    std::array<std::array<double, 2>, 3> gphi{};
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < ctx.nv; ++k) {
      gphi[static_cast<std::size_t>(k)] = ctx.grad_phi(c, k);
      const double uk = uvals[static_cast<std::size_t>(cell[k])];
      gx += gphi[static_cast<std::size_t>(k)][0] * uk;
      gy += gphi[static_cast<std::size_t>(k)][1] * uk;
    }
    const double s2 = gx * gx + gy * gy + d2;
    const double acoef =
        s2 == 0.0 ? (spec.p == 2.0 ? 1.0 : 0.0) : std::pow(s2, 0.5 * spec.p - 1.0);

    for (std::size_t q = 0; q < nq; ++q) {
      const double w = ctx.qw[q] * vol;
      double uq = 0.0;
      for (int k = 0; k < ctx.nv; ++k)
        uq += ctx.qbasis[q][static_cast<std::size_t>(k)] *
              uvals[static_cast<std::size_t>(cell[k])];
      const double bq = coercivity_b(spec, std::abs(truncate_T(ctx.n, uq)));
      const double fq = truncate_T(ctx.n, ctx.f_at_q[c * nq + q]);
      const double ueval = floor_eps > 0.0 ? std::max(uq, floor_eps) : uq;
      const double hq = regularized_h(spec, ctx.n, ueval);
      for (int i = 0; i < ctx.nv; ++i) {
        const int gi = mesh.interior_index[static_cast<std::size_t>(cell[i])];
        if (gi < 0) continue;
        const auto& gpi = gphi[static_cast<std::size_t>(i)];
        (*rhs)(gi) += w * fq * hq * ctx.qbasis[q][static_cast<std::size_t>(i)];
        for (int j = 0; j < ctx.nv; ++j) {
          const int gj = mesh.interior_index[static_cast<std::size_t>(cell[j])];
          if (gj < 0) continue;
          const auto& gpj = gphi[static_cast<std::size_t>(j)];
          trips->emplace_back(gi, gj,
                              w * bq * acoef *
                                  (gpj[0] * gpi[0] + gpj[1] * gpi[1]));
        }
      }
    }
  }
}

Eigen::VectorXd solve_sparse(std::size_t size, const std::vector<Triplet>& trips,
                             const Eigen::VectorXd& rhs) {
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(size),
                                static_cast<Eigen::Index>(size));
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SingularJacobian();
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SingularJacobian();
  return x;
}

void apply_interior_step(const Mesh& mesh, const std::vector<double>& base,
                         const Eigen::VectorXd& d, double lambda,
                         std::vector<double>* out) {
  *out = base;
  for (std::size_t v = 0; v < mesh.n_nodes(); ++v) {
    const int gi = mesh.interior_index[v];
    if (gi >= 0) (*out)[v] = base[v] + lambda * d(gi);
  }
}

/// Initial field for the first stage: the linear problem with the singular
/// factor replaced by the constant n, -div(alpha grad w) = n T_n(f).
std::vector<double> poisson_init_values(const AssemblyContext& ctx) {
  const Mesh& mesh = ctx.mesh;
  const double vol = mesh.element_volume;
  std::vector<Triplet> trips;
  trips.reserve(mesh.n_cells() * 9);
  Eigen::VectorXd rhs =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.n_interior));
  const std::size_t nq = ctx.qw.size();
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    for (int i = 0; i < ctx.nv; ++i) {
      const int gi = mesh.interior_index[static_cast<std::size_t>(cell[i])];
      if (gi < 0) continue;
      const auto gpi = ctx.grad_phi(c, i);
      for (int j = 0; j < ctx.nv; ++j) {
        const int gj = mesh.interior_index[static_cast<std::size_t>(cell[j])];
        if (gj < 0) continue;
        const auto gpj = ctx.grad_phi(c, j);
        trips.emplace_back(gi, gj,
                           vol * ctx.spec.alpha *
                               (gpj[0] * gpi[0] + gpj[1] * gpi[1]));
      }
      for (std::size_t q = 0; q < nq; ++q) {
        const double fq = truncate_T(ctx.n, ctx.f_at_q[c * nq + q]);
        rhs(gi) += ctx.qw[q] * vol * ctx.n * fq *
                   ctx.qbasis[q][static_cast<std::size_t>(i)];
      }
    }
  }
  const Eigen::VectorXd w = solve_sparse(mesh.n_interior, trips, rhs);
  std::vector<double> vals(mesh.n_nodes(), 0.0);
  for (std::size_t v = 0; v < mesh.n_nodes(); ++v) {
    const int gi = mesh.interior_index[v];
    if (gi >= 0) vals[v] = w(gi);
  }
  return vals;
}

void clip_tiny_negatives(std::vector<double>* vals) {
  for (double& v : *vals)
    if (v < 0.0 && v > -1e-12) v = 0.0;
}

DiscreteField solve_regularized_impl(const ProblemSpec& spec,
                                     const std::shared_ptr<const Mesh>& mesh,
                                     double n, const std::vector<double>& init,
                                     const NewtonConfig& cfg, int* iters_out) {
  if (!(n > 0.0)) throw ConfigError("truncation level must be positive");
  AssemblyContext ctx(spec, *mesh, n);
  const double delta = spec.p < 2.0 ? 1e-10 : 0.0;

  std::vector<double> u = init;
  for (std::size_t v = 0; v < mesh->n_nodes(); ++v)
    if (mesh->boundary[v]) u[v] = 0.0;

  Eigen::VectorXd F(static_cast<Eigen::Index>(mesh->n_interior));
  assemble(ctx, u, cfg.positivity_floor, delta, &F, nullptr);
  double norm_f = F.norm();

  int it = 0;
  int consecutive_fail = 0;
  std::vector<double> utry;
  Eigen::VectorXd ftry(static_cast<Eigen::Index>(mesh->n_interior));

  while (norm_f > cfg.residual_tol) {
    if (it >= cfg.max_iter) throw NewtonDivergence(norm_f);
    ++it;

    std::vector<Triplet> trips;
    trips.reserve(mesh->n_cells() * 9 * ctx.qw.size());
    assemble(ctx, u, cfg.positivity_floor, delta, nullptr, &trips);
    const Eigen::VectorXd d = solve_sparse(mesh->n_interior, trips, -F);

    // Backtracking line search on the residual norm.
    bool accepted = false;
    double best_norm = norm_f;
    std::vector<double> best_u;
    for (double lambda = 1.0; lambda >= 1e-12; lambda *= cfg.damping) {
      apply_interior_step(*mesh, u, d, lambda, &utry);
      assemble(ctx, utry, cfg.positivity_floor, delta, &ftry, nullptr);
      const double nt = ftry.norm();
      if (nt <= (1.0 - 1e-4 * lambda) * norm_f) {
        u.swap(utry);
        F.swap(ftry);
        norm_f = nt;
        accepted = true;
        break;
      }
      if (nt < best_norm) {
        best_norm = nt;
        best_u = utry;
      }
    }
    if (accepted) {
      consecutive_fail = 0;
      continue;
    }

    ++consecutive_fail;
    if (consecutive_fail < 3 && best_norm < norm_f) {
      // Sub-Armijo but strictly decreasing: keep the best trial and retry.
      u.swap(best_u);
      assemble(ctx, u, cfg.positivity_floor, delta, &F, nullptr);
      norm_f = best_norm;
      continue;
    }
    // Frozen-coefficient fallback.
    std::vector<Triplet> ptrips;
    ptrips.reserve(mesh->n_cells() * 9 * ctx.qw.size());
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(mesh->n_interior));
    assemble_picard(ctx, u, cfg.positivity_floor, delta, &ptrips, &rhs);
    const Eigen::VectorXd w = solve_sparse(mesh->n_interior, ptrips, rhs);
    utry.assign(mesh->n_nodes(), 0.0);
    for (std::size_t v = 0; v < mesh->n_nodes(); ++v) {
      const int gi = mesh->interior_index[v];
      if (gi >= 0) utry[v] = w(gi);
    }
    assemble(ctx, utry, cfg.positivity_floor, delta, &ftry, nullptr);
    const double nt = ftry.norm();
    if (nt >= norm_f && consecutive_fail >= 5) throw NewtonDivergence(norm_f);
    if (nt < norm_f) consecutive_fail = 0;
    u.swap(utry);
    F.swap(ftry);
    norm_f = nt;
  }

  clip_tiny_negatives(&u);
  if (iters_out) *iters_out = it;
  DiscreteField out(mesh);
  out.values = std::move(u);
  return out;
}

}  // namespace

DiscreteField solve_regularized(const ProblemSpec& spec,
                                const std::shared_ptr<const Mesh>& mesh,
                                double n, const DiscreteField& init,
                                const NewtonConfig& cfg) {
  spec.validate();
  if (!mesh) throw ConfigError("mesh must not be null");
  if (init.mesh.get() != mesh.get())
    throw std::invalid_argument("initial field lives on a different mesh");
  return solve_regularized_impl(spec, mesh, n, init.values, cfg, nullptr);
}

SolveResult solve_singular(const ProblemSpec& spec,
                           const std::shared_ptr<const Mesh>& mesh,
                           const RegularizationSchedule& schedule,
                           const NewtonConfig& cfg) {
  spec.validate();
  if (!mesh) throw ConfigError("mesh must not be null");
  schedule.validate();

  std::size_t stages = schedule.n_values.size();
  if (schedule.max_outer > 0)
    stages = std::min<std::size_t>(stages,
                                   static_cast<std::size_t>(schedule.max_outer));

  SolveResult res;
  std::vector<double> prev_values;
  for (std::size_t k = 0; k < stages; ++k) {
    const double n = schedule.n_values[k];
    std::vector<double> init;
    if (k == 0) {
      AssemblyContext ctx(spec, *mesh, n);
      init = poisson_init_values(ctx);
    } else {
      init = prev_values;
    }
    int iters = 0;
    DiscreteField u_k = solve_regularized_impl(spec, mesh, n, init, cfg, &iters);

    res.n_values.push_back(n);
    res.newton_iters.push_back(iters);
    res.residuals.push_back(residual_of(spec, *mesh, n, u_k));
    res.history_fields.push_back(u_k);

    bool stop = false;
    if (k > 0) {
      DiscreteField prev_field(mesh);
      prev_field.values = prev_values;
      const double inc =
          lebesgue_norm(field_difference(u_k, prev_field), spec.p);
      res.increments.push_back(inc);
      if (inc <= schedule.outer_tol) {
        res.converged = true;
        stop = true;
      }
    }
    prev_values = u_k.values;
    if (stop) break;
  }

  res.field = res.history_fields.back();
  res.residual = res.residuals.back();
  // Diagnostic: increments that grow again after the burn-in of the first
  // three mark a non-contractive outer map.
  for (std::size_t j = 3; j < res.increments.size(); ++j)
    if (res.increments[j] > res.increments[j - 1] * (1.0 + 1e-12))
      res.non_contractive = true;
  return res;
}

double residual_of(const ProblemSpec& spec, const Mesh& mesh, double n,
                   const DiscreteField& u) {
  if (u.mesh.get() != &mesh)
    throw std::invalid_argument("field lives on a different mesh");
  AssemblyContext ctx(spec, mesh, n);
  Eigen::VectorXd F(static_cast<Eigen::Index>(mesh.n_interior));
  assemble(ctx, u.values, 0.0, 0.0, &F, nullptr);
  return F.norm();
}

}  // namespace singelliptic
