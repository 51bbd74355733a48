#include "singelliptic/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace singelliptic {

namespace {

// Legendre polynomial value and derivative at x (on [-1,1]).
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussRule compute_gauss(int n) {
  GaussRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    // Chebyshev-like initial guess, then Newton to machine precision.
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map from [-1,1] to [0,1]; weights then sum to 1.
    rule.points[static_cast<std::size_t>(n - 1 - k)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(n - 1 - k)] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre_01(int n) {
  if (n < 1 || (n > 16 && n != 20 && n != 24 && n != 32))
    throw std::invalid_argument("unsupported Gauss-Legendre size");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

const TriangleRule& triangle_rule_degree5() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    const double a = 0.0597158717897698;
    const double b = 0.4701420641051151;
    const double c = 0.7974269853530873;
    const double d = 0.1012865073234563;
    const double wa = 0.1323941527885062;
    const double wc = 0.1259391805448271;
    r.bary = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
              {a, b, b},
              {b, a, b},
              {b, b, a},
              {c, d, d},
              {d, c, d},
              {d, d, c}};
    r.weights = {9.0 / 40.0, wa, wa, wa, wc, wc, wc};
    return r;
  }();
  return rule;
}

TriangleRule duffy_rule(int n) {
  const GaussRule& g = gauss_legendre_01(n);
  TriangleRule r;
  r.bary.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  r.weights.reserve(r.bary.capacity());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = g.points[static_cast<std::size_t>(i)];
      const double t = g.points[static_cast<std::size_t>(j)];
      const double x = s * (1.0 - t);
      const double y = s * t;
      // Jacobian of the collapse is s; reference-triangle area is 1/2, and
      // our convention scales weights to sum to 1 over the triangle.
      const double w = g.weights[static_cast<std::size_t>(i)] *
                       g.weights[static_cast<std::size_t>(j)] * s * 2.0;
      r.bary.push_back({1.0 - x - y, x, y});
      r.weights.push_back(w);
    }
  }
  return r;
}

}  // namespace singelliptic
