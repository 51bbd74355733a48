#pragma once
// Uniform simplicial meshes of axis-aligned boxes (intervals in 1D, each grid
// square split into two triangles in 2D), piecewise-linear nodal fields on
// them, and the quadrature-backed norm computations every other module uses.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace singelliptic {

struct Mesh {
  int dim = 1;                         // 1 or 2
  int resolution = 0;                  // cells per axis
  std::array<double, 2> extents{1.0, 1.0};
  std::vector<std::array<double, 2>> nodes;  // coordinates (y = 0 in 1D)
  std::vector<std::array<int, 3>> cells;     // 1D cells use {a, b, -1}
  std::vector<bool> boundary;                // per-node boundary flag
  double h = 0.0;                            // max element diameter
  double element_volume = 0.0;               // uniform across elements
  // Constant gradients of the three vertex basis functions per cell (2D).
  std::vector<std::array<std::array<double, 2>, 3>> cell_grads;
  // Interior numbering: node -> compact interior index, or -1 on the boundary.
  std::vector<int> interior_index;
  std::size_t n_interior = 0;

  std::size_t n_nodes() const { return nodes.size(); }
  std::size_t n_cells() const { return cells.size(); }
  double domain_measure() const;
};

/// Builds the uniform mesh with `resolution` cells per axis over the box
/// [0, extents[0]] (x [0, extents[1]] for dim 2). Throws ConfigError for
/// resolution < 2 or unsupported dim (meshes exist only for dim 1 and 2).
std::shared_ptr<const Mesh> build_mesh(int dim,
                                       const std::array<double, 2>& extents,
                                       int resolution);

/// Piecewise-linear scalar field given by one value per mesh node.
struct DiscreteField {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;

  DiscreteField() = default;
  explicit DiscreteField(std::shared_ptr<const Mesh> m, double fill = 0.0);
};

/// Nodal interpolation of a callable (arguments: point coordinates).
DiscreteField interpolate(std::shared_ptr<const Mesh> mesh,
                          const std::function<double(std::span<const double>)>& f);

/// a - b on the shared mesh (throws std::invalid_argument on mesh mismatch).
DiscreteField field_difference(const DiscreteField& a, const DiscreteField& b);

/// Constant gradient of the P1 interpolant on one cell.
std::array<double, 2> cell_gradient(const DiscreteField& u, std::size_t cell);

/// L^q norm of the P1 interpolant, (integral |u_h|^q)^{1/q}. Pass
/// q = infinity for the max of |nodal values|. Integer-degree integrands use
/// a Gauss rule exact for their polynomial degree; fractional powers use a
/// fixed 5-point Gauss rule per element (per axis in 2D), which is
/// approximate -- see lebesgue_norm_with_error for the estimated quadrature
/// error. Throws std::domain_error for q < 1.
double lebesgue_norm(const DiscreteField& u, double q);

struct NormResult {
  double value = 0.0;
  double quad_error_estimate = 0.0;  // |5-point result - higher-order result|
};
/// Same as lebesgue_norm but reports the estimated quadrature error
/// (difference against a higher-order rule; exactly 0 for integer powers).
NormResult lebesgue_norm_with_error(const DiscreteField& u, double q);

/// W^{1,p} seminorm: (sum over cells of |grad u|^p * volume)^{1/p}, using the
/// constant per-cell gradient. Throws std::domain_error for p < 1.
double sobolev_seminorm(const DiscreteField& u, double p);

/// Nodal power: values[i] = u[i]^e. Requires u >= 0 nodally (negative nodal
/// values throw std::domain_error) and e > 0.
DiscreteField power_transform(const DiscreteField& u, double e);

/// L^q norm of an arbitrary function over the mesh by per-element Gauss
/// quadrature of the given order (points per axis). Pass q = infinity for
/// the max of |f| over all quadrature points and nodes. Used for source
/// norms where f is not a nodal field.
double function_lebesgue_norm(const Mesh& mesh,
                              const std::function<double(std::span<const double>)>& f,
                              double q, int order = 8);

}  // namespace singelliptic
