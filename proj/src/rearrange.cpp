#include "singelliptic/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "singelliptic/quadrature.hpp"

namespace singelliptic {

GeometryConstants GeometryConstants::unit_ball(int N) {
  if (N < 1) throw std::domain_error("unit_ball requires N >= 1");
  const double n = static_cast<double>(N);
  return GeometryConstants{
      N, std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0)};
}

namespace {

// A single-signed linear patch of |u|: up to 3 nonnegative vertex values and
// a measure. 1D patches use two values (vals[2] unused), 2D patches three.
struct AbsElement {
  std::array<double, 3> vals{0.0, 0.0, 0.0};
  double meas = 0.0;
  int nvals = 2;
};

void push_segment(std::vector<AbsElement>& out, double a, double b,
                  double len) {
  if (len <= 0.0) return;
  AbsElement e;
  e.vals = {std::abs(a), std::abs(b), 0.0};
  e.meas = len;
  e.nvals = 2;
  out.push_back(e);
}

void push_triangle(std::vector<AbsElement>& out, double v0, double v1,
                   double v2, double area) {
  if (area <= 0.0) return;
  AbsElement e;
  e.vals = {std::abs(v0), std::abs(v1), std::abs(v2)};
  std::sort(e.vals.begin(), e.vals.end());
  e.meas = area;
  e.nvals = 3;
  out.push_back(e);
}

// Splits one triangle carrying a linear function with (sorted) vertex values
// into single-signed pieces of |u| and appends them. Geometry enters only
// through value fractions, so areas follow from the values alone.
void split_triangle_abs(std::vector<AbsElement>& out, double v0, double v1,
                        double v2, double area) {
  if (v0 >= 0.0 || v2 <= 0.0) {  // already single-signed
    push_triangle(out, v0, v1, v2, area);
    return;
  }
  if (v1 <= 0.0) {
    // One strictly positive vertex (v2). Cut points sit on the v0->v2 and
    // v1->v2 edges at the zero level.
    const double la = -v0 / (v2 - v0);  // fraction along v0->v2
    const double lb = -v1 / (v2 - v1);  // fraction along v1->v2
    push_triangle(out, 0.0, 0.0, v2, area * (1.0 - la) * (1.0 - lb));
    push_triangle(out, v0, v1, 0.0, area * lb);
    push_triangle(out, v0, 0.0, 0.0, area * (1.0 - lb) * la);
  } else {
    // Two nonnegative vertices: mirror the previous case with u -> -u.
    const double la = v2 / (v2 - v0);  // zero cut on v0->v2 as seen from v2
    const double lb = v1 / (v1 - v0);  // zero cut on v0->v1 as seen from v1
    push_triangle(out, 0.0, 0.0, v0, area * (1.0 - la) * (1.0 - lb));
    push_triangle(out, v2, v1, 0.0, area * lb);
    push_triangle(out, v2, 0.0, 0.0, area * (1.0 - lb) * la);
  }
}

std::vector<AbsElement> abs_elements(const DiscreteField& u) {
  const Mesh& mesh = *u.mesh;
  std::vector<AbsElement> out;
  out.reserve(mesh.n_cells() + mesh.n_cells() / 4);
  for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    if (mesh.dim == 1) {
      const double a = u.values[static_cast<std::size_t>(cell[0])];
      const double b = u.values[static_cast<std::size_t>(cell[1])];
      const double len = mesh.element_volume;
      if (a * b < 0.0) {
        const double frac = std::abs(a) / (std::abs(a) + std::abs(b));
        push_segment(out, a, 0.0, len * frac);
        push_segment(out, 0.0, b, len * (1.0 - frac));
      } else {
        push_segment(out, a, b, len);
      }
    } else {
      std::array<double, 3> v{u.values[static_cast<std::size_t>(cell[0])],
                              u.values[static_cast<std::size_t>(cell[1])],
                              u.values[static_cast<std::size_t>(cell[2])]};
      std::sort(v.begin(), v.end());
      split_triangle_abs(out, v[0], v[1], v[2], mesh.element_volume);
    }
  }
  return out;
}

// |{u > t}| within one nonnegative patch.
double patch_measure_gt(const AbsElement& e, double t) {
  if (e.nvals == 2) {
    const double lo = std::min(e.vals[0], e.vals[1]);
    const double hi = std::max(e.vals[0], e.vals[1]);
    if (t < lo) return e.meas;
    if (t >= hi) return 0.0;
    return e.meas * (hi - t) / (hi - lo);
  }
  const double v0 = e.vals[0], v1 = e.vals[1], v2 = e.vals[2];
  if (t < v0) return e.meas;
  if (t >= v2) return 0.0;
  if (t < v1) {
    const double d = (v1 - v0) * (v2 - v0);
    return e.meas * (1.0 - (t - v0) * (t - v0) / d);
  }
  const double d = (v2 - v1) * (v2 - v0);
  return e.meas * (v2 - t) * (v2 - t) / d;
}

double patch_flat_at(const AbsElement& e, double t) {
  const double lo = e.vals[0];
  const double hi = e.nvals == 2 ? e.vals[1] : e.vals[2];
  return (lo == hi && lo == t) ? e.meas : 0.0;
}

double measure_gt(const std::vector<AbsElement>& els, double t) {
  double tot = 0.0;
  for (const auto& e : els) tot += patch_measure_gt(e, t);
  return tot;
}

double measure_flat(const std::vector<AbsElement>& els, double t) {
  double tot = 0.0;
  for (const auto& e : els) tot += patch_flat_at(e, t);
  return tot;
}

}  // namespace

double RearrangementProfile::Piece::eval(double t) const {
  const double tau = (t - t0) / (t1 - t0);
  return m0 * (2.0 * tau * tau - 3.0 * tau + 1.0) +
         mm * (-4.0 * tau * tau + 4.0 * tau) + m1 * (2.0 * tau * tau - tau);
}

double RearrangementProfile::Piece::eval_derivative(double t) const {
  const double tau = (t - t0) / (t1 - t0);
  const double dP = m0 * (4.0 * tau - 3.0) + mm * (-8.0 * tau + 4.0) +
                    m1 * (4.0 * tau - 1.0);
  return dP / (t1 - t0);
}

double RearrangementProfile::mu(double t) const {
  if (t < 0.0) throw std::domain_error("distribution function requires t >= 0");
  if (pieces.empty() || t >= max_value) return 0.0;
  // Linear scan is fine: pieces are short-lived lookups in tests and sweeps.
  for (const auto& piece : pieces) {
    if (t < piece.t1) {
      if (t < piece.t0) return support_measure;  // below the first piece
      // The interpolation basis can drift a few ulp outside the piece's own
      // measure range; clamping keeps mu monotone across piece boundaries so
      // ustar(mu(t)) resolves inside the correct piece.
      return std::clamp(piece.eval(t), piece.m1, piece.m0);
    }
  }
  return 0.0;
}

double RearrangementProfile::ustar(double s) const {
  if (s < 0.0) throw std::domain_error("rearrangement requires s >= 0");
  if (pieces.empty()) return 0.0;
  if (s >= support_measure) return 0.0;
  // mu(t) > 0 strictly below the top level, so u*(0) is the maximum exactly.
  // Bisection cannot see that: the top piece's quadratic is tangent to zero
  // there and its evaluation is all cancellation noise within sqrt(ulp) of
  // the max.
  if (s == 0.0) return max_value;
  // Jump gaps: s in [mu(t1+), mu(t1-)) pins u* at the plateau level t1.
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double next_m0 = i + 1 < pieces.size() ? pieces[i + 1].m0 : 0.0;
    if (next_m0 <= s && s < pieces[i].m1) return pieces[i].t1;
  }
  // First piece (lowest levels) whose measure range contains s. Bisect on the
  // same clamped evaluation mu() uses, keeping mu(lo) > s at all times, and
  // return lo: it sits one step below inf{ t : mu(t) <= s }, so
  // ustar(mu(t)) <= t holds by construction. A closed-form inversion cannot
  // offer that: on a nearly flat piece the level error is the measure
  // roundoff divided by a tiny slope.
  for (const auto& piece : pieces) {
    if (!(piece.m1 <= s && s <= piece.m0)) continue;
    if (s >= piece.m0) return piece.t0;
    const auto piece_mu = [&piece](double t) {
      return std::clamp(piece.eval(t), piece.m1, piece.m0);
    };
    double lo = piece.t0, hi = piece.t1;  // mu(lo) = m0 > s, mu(hi) = m1 <= s
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (piece_mu(mid) > s ? lo : hi) = mid;
    }
    return lo;
  }
  return max_value;  // s below mu(max_value-): only the top level qualifies
}

double RearrangementProfile::stieltjes(
    const std::function<double(double)>& phi) const {
  const GaussRule& g = gauss_legendre_01(15);
  double total = 0.0;
  for (const auto& piece : pieces) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.points.size(); ++k) {
      const double tau = g.points[k];
      const double t = piece.t0 + tau * (piece.t1 - piece.t0);
      const double dP = piece.m0 * (4.0 * tau - 3.0) +
                        piece.mm * (-8.0 * tau + 4.0) +
                        piece.m1 * (4.0 * tau - 1.0);
      acc += g.weights[k] * phi(t) * (-dP);
    }
    total += acc;
  }
  for (const auto& [level, jump] : jumps) total += phi(level) * jump;
  total += phi(0.0) * (total_measure - support_measure);
  return total;
}

double distribution_function(const DiscreteField& u, double t) {
  if (t < 0.0) throw std::domain_error("distribution function requires t >= 0");
  return measure_gt(abs_elements(u), t);
}

double level_set_measure(const DiscreteField& u, double t) {
  return measure_flat(abs_elements(u), t);
}

RearrangementProfile decreasing_rearrangement(const DiscreteField& u) {
  const auto els = abs_elements(u);
  RearrangementProfile prof;
  prof.total_measure = 0.0;
  for (const auto& e : els) prof.total_measure += e.meas;

  std::vector<double> levels;
  levels.reserve(els.size() * 3 + 1);
  levels.push_back(0.0);
  for (const auto& e : els)
    for (int k = 0; k < e.nvals; ++k)
      levels.push_back(e.vals[static_cast<std::size_t>(k)]);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  prof.max_value = levels.back();

  // One strict measure g and one plateau measure f per level. Deriving the
  // left limit mu(level-) as g + f from these shared doubles (instead of a
  // separately rounded left-limit sum) makes adjacent piece ranges nest
  // exactly: m0 of piece i+1 never exceeds m1 of piece i, so every s in
  // [0, support] is served by exactly the piece or jump gap that owns it.
  std::vector<double> strict(levels.size()), flat(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    strict[i] = measure_gt(els, levels[i]);
    flat[i] = measure_flat(els, levels[i]);
  }

  prof.support_measure = strict[0];
  prof.pieces.reserve(levels.size());
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    RearrangementProfile::Piece piece;
    piece.t0 = levels[i];
    piece.t1 = levels[i + 1];
    piece.m0 = strict[i];
    piece.m1 = std::min(strict[i + 1] + flat[i + 1], piece.m0);
    piece.mm = std::clamp(measure_gt(els, 0.5 * (piece.t0 + piece.t1)),
                          piece.m1, piece.m0);
    prof.pieces.push_back(piece);
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] <= 0.0) continue;
    if (flat[i] > 0.0) prof.jumps.emplace_back(levels[i], flat[i]);
  }
  return prof;
}

namespace {

// Closed-form integral of u^q over one nonnegative patch (u linear).
// 1D: len * (b^{q+1} - a^{q+1}) / ((q+1)(b - a)).
// 2D: 2*area * second divided difference of g(t) = t^{q+2}/((q+1)(q+2)).
double patch_power_integral(const AbsElement& e, double q) {
  const double qp1 = q + 1.0;
  if (e.nvals == 2) {
    const double a = e.vals[0], b = e.vals[1];
    if (std::abs(b - a) <= 1e-9 * std::max({1.0, a, b}))
      return e.meas * std::pow(0.5 * (a + b), q);
    return e.meas * (std::pow(b, qp1) - std::pow(a, qp1)) / (qp1 * (b - a));
  }
  const double qp2 = q + 2.0;
  const double v0 = e.vals[0], v1 = e.vals[1], v2 = e.vals[2];
  const double scale = std::max({1.0, v0, v1, v2});
  const double g0 = std::pow(v0, qp2) / (qp1 * qp2);
  const double g1 = std::pow(v1, qp2) / (qp1 * qp2);
  const double g2 = std::pow(v2, qp2) / (qp1 * qp2);
  const double gap01 = v1 - v0, gap12 = v2 - v1, gap02 = v2 - v0;
  const double tol = 1e-7 * scale;
  if (gap02 <= tol) {
    // Nearly (or exactly) flat patch.
    return e.meas * std::pow((v0 + v1 + v2) / 3.0, q);
  }
  if (gap01 <= tol || gap12 <= tol) {
    // Two values nearly coincide: use the confluent divided difference with
    // the midpoint of the close pair (derivative limit). dg(t) = t^{q+1}/(q+1).
    if (gap01 <= tol) {
      const double vm = 0.5 * (v0 + v1);
      const double dgm = std::pow(vm, qp1) / qp1;
      const double gm = std::pow(vm, qp2) / (qp1 * qp2);
      const double dd = ((g2 - gm) / (v2 - vm) - dgm) / (v2 - vm);
      return 2.0 * e.meas * dd;
    }
    const double vm = 0.5 * (v1 + v2);
    const double dgm = std::pow(vm, qp1) / qp1;
    const double gm = std::pow(vm, qp2) / (qp1 * qp2);
    const double dd = (dgm - (gm - g0) / (vm - v0)) / (vm - v0);
    return 2.0 * e.meas * dd;
  }
  const double d01 = (g1 - g0) / gap01;
  const double d12 = (g2 - g1) / gap12;
  return 2.0 * e.meas * (d12 - d01) / gap02;
}

}  // namespace

std::pair<double, double> equimeasurability_power(const DiscreteField& u,
                                                  double q) {
  if (!(q >= 1.0))
    throw std::domain_error("equimeasurability_power requires q >= 1");
  const auto els = abs_elements(u);
  double mesh_side = 0.0;
  for (const auto& e : els) mesh_side += patch_power_integral(e, q);
  const auto prof = decreasing_rearrangement(u);
  const double profile_side =
      prof.stieltjes([q](double t) { return std::pow(t, q); });
  return {mesh_side, profile_side};
}

std::pair<double, double> equimeasurability_check(
    const DiscreteField& u, const std::function<double(double)>& phi, int K) {
  if (phi(0.0) != 0.0)
    throw std::domain_error("equimeasurability_check requires phi(0) = 0");
  const auto prof = decreasing_rearrangement(u);
  const double top = std::max(prof.max_value, 1e-300);
  double prev = phi(0.0);
  for (int k = 1; k < std::max(K, 2); ++k) {
    const double t = top * k / (std::max(K, 2) - 1);
    const double v = phi(t);
    if (v < prev)
      throw std::domain_error("equimeasurability_check requires increasing phi");
    prev = v;
  }
  // Mesh side by high-order Gauss per single-signed patch.
  const auto els = abs_elements(u);
  const GaussRule& g = gauss_legendre_01(16);
  TriangleRule tri = duffy_rule(10);
  double mesh_side = 0.0;
  for (const auto& e : els) {
    double acc = 0.0;
    if (e.nvals == 2) {
      for (std::size_t k = 0; k < g.points.size(); ++k) {
        const double val = e.vals[0] + (e.vals[1] - e.vals[0]) * g.points[k];
        acc += g.weights[k] * phi(val);
      }
    } else {
      for (std::size_t k = 0; k < tri.bary.size(); ++k) {
        const auto& bc = tri.bary[k];
        const double val =
            bc[0] * e.vals[0] + bc[1] * e.vals[1] + bc[2] * e.vals[2];
        acc += tri.weights[k] * phi(val);
      }
    }
    mesh_side += acc * e.meas;
  }
  return {mesh_side, prof.stieltjes(phi)};
}

}  // namespace singelliptic
