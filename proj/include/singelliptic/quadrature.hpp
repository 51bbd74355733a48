#pragma once
// Quadrature tables used throughout: Gauss-Legendre rules on [0,1] and a
// degree-5 symmetric 7-point rule on the reference triangle. Triangle rules
// of higher order are formed by a tensor Gauss rule under the Duffy
// (square-to-triangle) collapse.

#include <array>
#include <cstddef>
#include <vector>

namespace singelliptic {

/// Gauss-Legendre rule with `n` points mapped to [0,1]; weights sum to 1.
/// Supported n: 1..16, 20, 24, 32. Throws std::invalid_argument otherwise.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre_01(int n);

/// Symmetric 7-point rule on the reference triangle (0,0)-(1,0)-(0,1),
/// exact for polynomials up to degree 5. Barycentric coordinates and
/// weights normalized to sum to 1 (multiply by the element area).
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
};
const TriangleRule& triangle_rule_degree5();

/// Tensor Gauss rule collapsed onto the reference triangle via the Duffy
/// map (x,y) = (s(1-t), s t) with Jacobian s; `n` points per axis give a
/// rule exact for polynomials of total degree 2n-2 on the triangle.
/// Weights sum to 1 (multiply by the element area).
TriangleRule duffy_rule(int n);

}  // namespace singelliptic
