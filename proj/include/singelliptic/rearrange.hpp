#pragma once
// Distribution functions and decreasing rearrangements of piecewise-linear
// fields, computed from exact level-set geometry (superlevel sets of a linear
// function on a simplex have closed-form measure). Between consecutive nodal
// levels the distribution function mu(t) = |{|u| > t}| is exactly a quadratic
// polynomial in t, so the profile stores one quadratic piece per level gap
// plus an explicit jump atom |{|u| = level}| for every plateau level.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "singelliptic/grid.hpp"

namespace singelliptic {

/// Dimension-dependent geometry constants: C_N is the volume of the
/// N-dimensional unit ball, pi^{N/2} / Gamma(N/2 + 1).
struct GeometryConstants {
  int N = 1;
  double C_N = 2.0;
  static GeometryConstants unit_ball(int N);
};

/// Decreasing-rearrangement profile of a field. mu is right-continuous and
/// nonincreasing; u*(s) = inf{ t >= 0 : mu(t) <= s } is nonincreasing and
/// right-continuous with u*(0) = max |u| and u*(s) = 0 for s >= the support
/// measure.
struct RearrangementProfile {
  struct Piece {
    double t0, t1;       // level interval [t0, t1]
    double m0, mm, m1;   // mu at t0 (right limit), midpoint, t1 (left limit)
    double eval(double t) const;        // quadratic through the three values
    double eval_derivative(double t) const;
  };
  std::vector<Piece> pieces;                      // increasing in t
  std::vector<std::pair<double, double>> jumps;   // (level, |{|u| = level}|)
  double total_measure = 0.0;                     // |Omega|
  double max_value = 0.0;                         // u*(0) = max |u| (P1 => max)
  double support_measure = 0.0;                   // mu(0+) = |{|u| > 0}|

  /// Distribution function mu(t) = |{|u| > t}| evaluated from the pieces.
  double mu(double t) const;
  /// Decreasing rearrangement u*(s); 0 for s >= support_measure.
  double ustar(double s) const;
  /// integral_0^{|Omega|} phi(u*(s)) ds as a Stieltjes integral over the
  /// pieces (15-point Gauss each) plus the jump atoms and the zero set.
  double stieltjes(const std::function<double(double)>& phi) const;
};

/// Exact measure of the superlevel set {|u_h| > t}. 1D elements are split at
/// sign changes; in 2D {|u|>t} = {u>t} union {-u>t}, each with closed-form
/// triangle measure.
double distribution_function(const DiscreteField& u, double t);

/// Measure of the exact level set {|u_h| = t}; positive only where whole
/// elements sit at the constant value t (plateaus).
double level_set_measure(const DiscreteField& u, double t);

/// Builds the full profile: distinct nodal levels of |u| (plus 0) become
/// piece boundaries; each piece stores mu at its one-sided limits and
/// midpoint, which pins the quadratic exactly.
RearrangementProfile decreasing_rearrangement(const DiscreteField& u);

/// Both sides of the equimeasurability identity
///   integral_Omega phi(|u|) dx  =  integral_0^{|Omega|} phi(u*(s)) ds
/// for a continuous increasing phi with phi(0) = 0. The map's monotonicity is
/// validated on K samples of [0, max|u|] (throws std::domain_error if the
/// samples decrease or phi(0) != 0). The mesh side uses per-element Gauss
/// quadrature of high order; for power maps prefer equimeasurability_power,
/// whose mesh side is in closed form.
std::pair<double, double> equimeasurability_check(
    const DiscreteField& u, const std::function<double(double)>& phi,
    int K = 64);

/// Equimeasurability for phi(t) = t^q (q >= 1) with an exact closed-form
/// mesh side: per 1D element, h (b^{q+1} - a^{q+1}) / ((q+1)(b-a)); per
/// triangle, 2A times the second divided difference of t^{q+2}/((q+1)(q+2))
/// at the vertex values (elements are split at sign changes first).
std::pair<double, double> equimeasurability_power(const DiscreteField& u,
                                                  double q);

}  // namespace singelliptic
