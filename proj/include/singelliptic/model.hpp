#pragma once
// Problem definition for the degenerate singular elliptic solver:
//
//   -div( b(|u|) |grad u|^{p-2} grad u ) = f(x) / u^gamma,   u > 0 in Omega,
//    u = 0 on the boundary,
//
// with the coercivity weight b(t) = alpha / (1+t)^{theta(p-1)} that degrades
// as the solution grows, and a source f >= 0 in L^m(Omega). This header owns
// the problem description, the weight b and its primitive, and the truncation
// and regularization functions used by the continuation scheme: T_n clamps to
// [-n, n], h_n caps the singular factor C/s^gamma at n.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace singelliptic {

/// Thrown for malformed configuration (CLI maps it to exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a bound or exponent formula is requested outside the
/// parameter regime where it is defined.
struct OutOfRegime : std::domain_error {
  explicit OutOfRegime(const std::string& what) : std::domain_error(what) {}
};

/// Source term descriptor. Three shapes are supported:
///  - constant:      f(x) = value
///  - radial_power:  f(x) = |x - x0|^{-exponent} with x0 the domain center
///  - tabulated:     nodal samples on a uniform grid over the domain,
///                   evaluated by multilinear interpolation
/// `m` is the claimed Lebesgue exponent of f (use a large value such as 1e6
/// for bounded sources; norms then reduce to the sup-norm).
struct SourceSpec {
  enum class Kind { Constant, RadialPower, Tabulated };
  Kind kind = Kind::Constant;
  double value = 1.0;           // Constant
  double exponent = 0.0;        // RadialPower: decay power a >= 0
  std::vector<double> samples;  // Tabulated: (res+1)^dim values, row-major
  int sample_res = 0;           // Tabulated: cells per axis of the sample grid
  double m = 1e6;               // claimed Lebesgue exponent, >= 1

  static SourceSpec constant(double value, double m = 1e6);
  static SourceSpec radial_power(double exponent, double m);
  static SourceSpec tabulated(std::vector<double> samples, int sample_res,
                              double m = 1e6);
};

/// Full problem instance. `dim` is the spatial dimension N; meshes are built
/// only for dim 1 or 2, while the exponent formulas accept any N > p. The
/// domain is the axis-aligned box [0, extents[0]] (x [0, extents[1]] in 2D).
struct ProblemSpec {
  double p = 2.0;        // growth exponent, > 1 (and < dim when dim >= 2)
  double theta = 0.0;    // degeneracy strength, in [0, 1]
  double alpha = 1.0;    // coercivity constant, > 0
  double gamma = 1.0;    // singularity strength, > 0
  double C = 1.0;        // singular numerator constant, > 0
  int dim = 1;           // spatial dimension N
  std::array<double, 2> extents{1.0, 1.0};  // box side lengths
  SourceSpec source;

  /// Throws ConfigError on any violated invariant: p > 1 (and p < dim for
  /// dim >= 2), 0 <= theta <= 1, alpha > 0, gamma > 0, C > 0, positive
  /// extents, and a well-formed source (nonnegative samples; for radial
  /// sources exponent*m < dim so f genuinely lies in L^m).
  void validate() const;

  double domain_measure() const;
  std::array<double, 2> center() const;

  /// Evaluates the source f at a point (size dim). Radial sources may return
  /// +infinity exactly at the center; downstream truncation caps it.
  double source_at(std::span<const double> x) const;
};

/// The monotone operator in divergence form, a(x,t,xi) = b(|t|)|xi|^{p-2} xi.
/// `beta` and the identically-zero offset a0 describe the growth envelope
/// |a(x,t,xi)| <= beta(a0(x) + |t|^{p-1} + |xi|^{p-1}); for this operator
/// beta = alpha and a0 = 0. They exist so the envelope is testable.
struct OperatorSpec {
  double p;
  double theta;
  double alpha;
  double beta;  // growth-envelope constant; equals alpha here

  static OperatorSpec from(const ProblemSpec& spec);
};

/// Coercivity weight b(t) = alpha/(1+t)^{theta(p-1)}, defined for t >= 0.
/// Nonincreasing in t; equals alpha at t = 0. Throws std::domain_error for
/// t < 0 or non-finite t.
double coercivity_b(const ProblemSpec& spec, double t);
double coercivity_b(double alpha, double theta, double p, double t);

/// Derivative db/dt (used by the Newton linearization).
double coercivity_b_derivative(double alpha, double theta, double p, double t);

/// Primitive of b^{1/(p-1)}:
///   theta < 1:  B(t) = alpha^{1/(p-1)} ((1+t)^{1-theta} - 1)/(1-theta)
///   theta = 1:  B(t) = alpha^{1/(p-1)} log(1+t)
/// Strictly increasing and unbounded; B(0) = 0. Throws std::domain_error for
/// negative input.
double primitive_B(const ProblemSpec& spec, double t);

/// Exact functional inverse of primitive_B; inverse_B(primitive_B(t)) = t to
/// 1e-12 relative. Throws std::domain_error for negative input.
double inverse_B(const ProblemSpec& spec, double s);

/// Clamp of s to [-n, n]. Requires n > 0.
double truncate_T(double n, double s);

/// One-sided derivative of truncate_T: 1 where |s| <= n (interior branch
/// wins at the kink), else 0.
double truncate_T_derivative(double n, double s);

/// Capped singular factor h_n(s) = min(n, C/s^gamma) for s > 0; for s <= 0
/// the singular factor is +infinity in the limit, so the cap returns n.
/// Always in (0, n]. Requires n > 0.
double regularized_h(const ProblemSpec& spec, double n, double s);

/// One-sided derivative of regularized_h in s: on the uncapped branch
/// (C/s^gamma <= n, including the cap boundary) it is -gamma*C*s^{-gamma-1};
/// on the capped branch and for s <= 0 it is 0.
double regularized_h_derivative(const ProblemSpec& spec, double n, double s);

/// Right-hand side of the regularized problem at a point:
/// T_n(f(x)) * h_n(s), bounded by n^2. Throws std::domain_error if x lies
/// outside the domain box.
double regularized_source(const ProblemSpec& spec, double n,
                          std::span<const double> x, double s);

/// Model flux a(x,t,xi) = b(|t|)|xi|^{p-2} xi. The second component is
/// ignored/zero in 1D. Defined as the zero vector at xi = 0 (the limit value,
/// which also covers 1 < p < 2 where |xi|^{p-2} alone blows up). Throws
/// std::domain_error on non-finite input.
std::array<double, 2> flux(const OperatorSpec& op, double t,
                           const std::array<double, 2>& xi);

}  // namespace singelliptic
