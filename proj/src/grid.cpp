#include "singelliptic/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "singelliptic/model.hpp"
#include "singelliptic/quadrature.hpp"

namespace singelliptic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_integer(double q) { return q == std::floor(q); }

// Gauss point count (per axis) for an integrand of polynomial degree `deg`.
int gauss_points_for_degree_1d(int deg) {
  int n = (deg + 2) / 2;  // 2n - 1 >= deg
  return std::max(n, 1);
}

}  // namespace

double Mesh::domain_measure() const {
  double meas = extents[0];
  if (dim == 2) meas *= extents[1];
  return meas;
}

std::shared_ptr<const Mesh> build_mesh(int dim,
                                       const std::array<double, 2>& extents,
                                       int resolution) {
  if (resolution < 2) throw ConfigError("mesh resolution must be >= 2");
  if (dim != 1 && dim != 2)
    throw ConfigError("meshes are available for dim 1 and 2 only");
  for (int d = 0; d < dim; ++d)
    if (!(extents[static_cast<std::size_t>(d)] > 0.0))
      throw ConfigError("domain extents must be strictly positive");

  auto mesh = std::make_shared<Mesh>();
  mesh->dim = dim;
  mesh->resolution = resolution;
  mesh->extents = extents;
  const int R = resolution;

  if (dim == 1) {
    const double L = extents[0];
    const double hx = L / R;
    mesh->nodes.resize(static_cast<std::size_t>(R) + 1);
    mesh->boundary.assign(mesh->nodes.size(), false);
    for (int i = 0; i <= R; ++i)
      mesh->nodes[static_cast<std::size_t>(i)] = {L * i / R, 0.0};
    mesh->boundary.front() = true;
    mesh->boundary.back() = true;
    mesh->cells.resize(static_cast<std::size_t>(R));
    for (int i = 0; i < R; ++i)
      mesh->cells[static_cast<std::size_t>(i)] = {i, i + 1, -1};
    mesh->h = hx;
    mesh->element_volume = hx;
  } else {
    const double Lx = extents[0], Ly = extents[1];
    const double hx = Lx / R, hy = Ly / R;
    const std::size_t stride = static_cast<std::size_t>(R) + 1;
    mesh->nodes.resize(stride * stride);
    mesh->boundary.assign(mesh->nodes.size(), false);
    const auto nid = [&](int ix, int iy) {
      return static_cast<int>(static_cast<std::size_t>(ix) * stride +
                              static_cast<std::size_t>(iy));
    };
    for (int ix = 0; ix <= R; ++ix) {
      for (int iy = 0; iy <= R; ++iy) {
        mesh->nodes[static_cast<std::size_t>(nid(ix, iy))] = {Lx * ix / R,
                                                              Ly * iy / R};
        if (ix == 0 || ix == R || iy == 0 || iy == R)
          mesh->boundary[static_cast<std::size_t>(nid(ix, iy))] = true;
      }
    }
    mesh->cells.reserve(2u * static_cast<std::size_t>(R) *
                        static_cast<std::size_t>(R));
    for (int ix = 0; ix < R; ++ix) {
      for (int iy = 0; iy < R; ++iy) {
        // Split each grid square along the (ix,iy)-(ix+1,iy+1) diagonal.
        mesh->cells.push_back({nid(ix, iy), nid(ix + 1, iy), nid(ix + 1, iy + 1)});
        mesh->cells.push_back({nid(ix, iy), nid(ix + 1, iy + 1), nid(ix, iy + 1)});
      }
    }
    mesh->h = std::hypot(hx, hy);
    mesh->element_volume = 0.5 * hx * hy;
    // Constant basis-function gradients per triangle.
    mesh->cell_grads.resize(mesh->cells.size());
    for (std::size_t c = 0; c < mesh->cells.size(); ++c) {
      const auto& cell = mesh->cells[c];
      const auto& P0 = mesh->nodes[static_cast<std::size_t>(cell[0])];
      const auto& P1 = mesh->nodes[static_cast<std::size_t>(cell[1])];
      const auto& P2 = mesh->nodes[static_cast<std::size_t>(cell[2])];
      const double d1x = P1[0] - P0[0], d1y = P1[1] - P0[1];
      const double d2x = P2[0] - P0[0], d2y = P2[1] - P0[1];
      const double det = d1x * d2y - d1y * d2x;  // = 2 * area (positive here)
      // grad lambda_1 and grad lambda_2 are rows of the inverse edge matrix.
      const std::array<double, 2> g1{d2y / det, -d2x / det};
      const std::array<double, 2> g2{-d1y / det, d1x / det};
      mesh->cell_grads[c][1] = g1;
      mesh->cell_grads[c][2] = g2;
      mesh->cell_grads[c][0] = {-g1[0] - g2[0], -g1[1] - g2[1]};
    }
  }

  mesh->interior_index.assign(mesh->n_nodes(), -1);
  int next = 0;
  for (std::size_t i = 0; i < mesh->n_nodes(); ++i)
    if (!mesh->boundary[i]) mesh->interior_index[i] = next++;
  mesh->n_interior = static_cast<std::size_t>(next);
  return mesh;
}

DiscreteField::DiscreteField(std::shared_ptr<const Mesh> m, double fill)
    : mesh(std::move(m)), values(mesh ? mesh->n_nodes() : 0, fill) {}

DiscreteField interpolate(std::shared_ptr<const Mesh> mesh,
                          const std::function<double(std::span<const double>)>& f) {
  DiscreteField u(mesh);
  for (std::size_t i = 0; i < mesh->n_nodes(); ++i)
    u.values[i] = f(std::span<const double>(mesh->nodes[i].data(),
                                            static_cast<std::size_t>(mesh->dim)));
  return u;
}

DiscreteField field_difference(const DiscreteField& a, const DiscreteField& b) {
  if (a.mesh.get() != b.mesh.get() || a.values.size() != b.values.size())
    throw std::invalid_argument("field_difference requires a shared mesh");
  DiscreteField d(a.mesh);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    d.values[i] = a.values[i] - b.values[i];
  return d;
}

std::array<double, 2> cell_gradient(const DiscreteField& u, std::size_t cell) {
  const Mesh& mesh = *u.mesh;
  const auto& c = mesh.cells[cell];
  if (mesh.dim == 1) {
    const double x0 = mesh.nodes[static_cast<std::size_t>(c[0])][0];
    const double x1 = mesh.nodes[static_cast<std::size_t>(c[1])][0];
    return {(u.values[static_cast<std::size_t>(c[1])] -
             u.values[static_cast<std::size_t>(c[0])]) /
                (x1 - x0),
            0.0};
  }
  std::array<double, 2> g{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const double v = u.values[static_cast<std::size_t>(c[static_cast<std::size_t>(k)])];
    g[0] += v * mesh.cell_grads[cell][static_cast<std::size_t>(k)][0];
    g[1] += v * mesh.cell_grads[cell][static_cast<std::size_t>(k)][1];
  }
  return g;
}

namespace {

// integral of |u_h|^q over the mesh with an n-point Gauss rule per element
// (per axis in 2D via the Duffy collapse unless the 7-point degree-5 rule
// suffices and `allow_deg5` is set).
double integral_abs_pow(const DiscreteField& u, double q, int n1d,
                        bool use_deg5) {
  const Mesh& mesh = *u.mesh;
  double total = 0.0;
  if (mesh.dim == 1) {
    const GaussRule& g = gauss_legendre_01(n1d);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      const double a = u.values[static_cast<std::size_t>(cell[0])];
      const double b = u.values[static_cast<std::size_t>(cell[1])];
      double acc = 0.0;
      for (std::size_t k = 0; k < g.points.size(); ++k) {
        const double val = a + (b - a) * g.points[k];
        acc += g.weights[k] * std::pow(std::abs(val), q);
      }
      total += acc * mesh.element_volume;
    }
    return total;
  }
  TriangleRule local;
  if (!use_deg5) local = duffy_rule(n1d);
  const TriangleRule& tr = use_deg5 ? triangle_rule_degree5() : local;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const double v0 = u.values[static_cast<std::size_t>(cell[0])];
    const double v1 = u.values[static_cast<std::size_t>(cell[1])];
    const double v2 = u.values[static_cast<std::size_t>(cell[2])];
    double acc = 0.0;
    for (std::size_t k = 0; k < tr.bary.size(); ++k) {
      const auto& bc = tr.bary[k];
      const double val = bc[0] * v0 + bc[1] * v1 + bc[2] * v2;
      acc += tr.weights[k] * std::pow(std::abs(val), q);
    }
    total += acc * mesh.element_volume;
  }
  return total;
}

double nodal_max_abs(const DiscreteField& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

double lebesgue_norm(const DiscreteField& u, double q) {
  if (q == kInf) return nodal_max_abs(u);
  if (!(q >= 1.0)) throw std::domain_error("lebesgue_norm requires q >= 1");
  const Mesh& mesh = *u.mesh;
  double integral;
  if (is_integer(q)) {
    const int deg = static_cast<int>(q);
    if (mesh.dim == 1) {
      integral = integral_abs_pow(u, q, gauss_points_for_degree_1d(deg), false);
    } else if (deg <= 5) {
      integral = integral_abs_pow(u, q, 0, true);
    } else {
      integral = integral_abs_pow(u, q, (deg + 3) / 2, false);  // 2n-2 >= deg
    }
  } else {
    // Fixed 5-point Gauss per element (per axis in 2D) for fractional powers.
    integral = integral_abs_pow(u, q, 5, false);
  }
  return std::pow(integral, 1.0 / q);
}

NormResult lebesgue_norm_with_error(const DiscreteField& u, double q) {
  NormResult r;
  r.value = lebesgue_norm(u, q);
  if (q == kInf || is_integer(q)) {
    r.quad_error_estimate = 0.0;
    return r;
  }
  const double refined =
      std::pow(integral_abs_pow(u, q, 12, false), 1.0 / q);
  r.quad_error_estimate = std::abs(refined - r.value);
  return r;
}

double sobolev_seminorm(const DiscreteField& u, double p) {
  if (!(p >= 1.0)) throw std::domain_error("sobolev_seminorm requires p >= 1");
  const Mesh& mesh = *u.mesh;
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto g = cell_gradient(u, c);
    const double mag = std::hypot(g[0], g[1]);
    total += std::pow(mag, p) * mesh.element_volume;
  }
  return std::pow(total, 1.0 / p);
}

DiscreteField power_transform(const DiscreteField& u, double e) {
  if (!(e > 0.0)) throw std::domain_error("power_transform requires e > 0");
  DiscreteField out(u.mesh);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u.values[i] < 0.0)
      throw std::domain_error("power_transform requires a nonnegative field");
    out.values[i] = std::pow(u.values[i], e);
  }
  return out;
}

double function_lebesgue_norm(const Mesh& mesh,
                              const std::function<double(std::span<const double>)>& f,
                              double q, int order) {
  if (q == kInf) {
    double m = 0.0;
    const auto consider = [&](const std::array<double, 2>& x) {
      const double v = std::abs(f(std::span<const double>(
          x.data(), static_cast<std::size_t>(mesh.dim))));
      if (std::isfinite(v)) m = std::max(m, v);
    };
    for (const auto& x : mesh.nodes) consider(x);
    return m;
  }
  if (!(q >= 1.0))
    throw std::domain_error("function_lebesgue_norm requires q >= 1");
  double total = 0.0;
  if (mesh.dim == 1) {
    const GaussRule& g = gauss_legendre_01(order);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      const double x0 = mesh.nodes[static_cast<std::size_t>(cell[0])][0];
      const double x1 = mesh.nodes[static_cast<std::size_t>(cell[1])][0];
      double acc = 0.0;
      for (std::size_t k = 0; k < g.points.size(); ++k) {
        const std::array<double, 2> x{x0 + (x1 - x0) * g.points[k], 0.0};
        acc += g.weights[k] *
               std::pow(std::abs(f(std::span<const double>(x.data(), 1))), q);
      }
      total += acc * mesh.element_volume;
    }
  } else {
    const TriangleRule tr = duffy_rule(order);
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      const auto& cell = mesh.cells[c];
      const auto& P0 = mesh.nodes[static_cast<std::size_t>(cell[0])];
      const auto& P1 = mesh.nodes[static_cast<std::size_t>(cell[1])];
      const auto& P2 = mesh.nodes[static_cast<std::size_t>(cell[2])];
      double acc = 0.0;
      for (std::size_t k = 0; k < tr.bary.size(); ++k) {
        const auto& bc = tr.bary[k];
        const std::array<double, 2> x{
            bc[0] * P0[0] + bc[1] * P1[0] + bc[2] * P2[0],
            bc[0] * P0[1] + bc[1] * P1[1] + bc[2] * P2[1]};
        acc += tr.weights[k] *
               std::pow(std::abs(f(std::span<const double>(x.data(), 2))), q);
      }
      total += acc * mesh.element_volume;
    }
  }
  return std::pow(total, 1.0 / q);
}

}  // namespace singelliptic
