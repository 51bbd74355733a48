#include "singelliptic/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace singelliptic {

namespace {

bool finite(double x) { return std::isfinite(x); }

void require_finite(double x, const char* what) {
  if (!finite(x)) throw std::domain_error(std::string(what) + " must be finite");
}

}  // namespace

SourceSpec SourceSpec::constant(double value, double m) {
  SourceSpec s;
  s.kind = Kind::Constant;
  s.value = value;
  s.m = m;
  return s;
}

SourceSpec SourceSpec::radial_power(double exponent, double m) {
  SourceSpec s;
  s.kind = Kind::RadialPower;
  s.exponent = exponent;
  s.m = m;
  return s;
}

SourceSpec SourceSpec::tabulated(std::vector<double> samples, int sample_res,
                                 double m) {
  SourceSpec s;
  s.kind = Kind::Tabulated;
  s.samples = std::move(samples);
  s.sample_res = sample_res;
  s.m = m;
  return s;
}

void ProblemSpec::validate() const {
  if (!finite(p) || p <= 1.0)
    throw ConfigError("p must be finite and > 1");
  if (dim >= 2 && p >= static_cast<double>(dim))
    throw ConfigError("requires N > p (p < dim for dim >= 2)");
  if (dim < 1) throw ConfigError("dim must be a positive integer");
  if (!finite(theta) || theta < 0.0 || theta > 1.0)
    throw ConfigError("theta must lie in [0, 1]");
  if (!finite(alpha) || alpha <= 0.0) throw ConfigError("alpha must be > 0");
  if (!finite(gamma) || gamma <= 0.0) throw ConfigError("gamma must be > 0");
  if (!finite(C) || C <= 0.0) throw ConfigError("C must be > 0");
  const int mesh_dims = std::min(dim, 2);
  for (int d = 0; d < mesh_dims; ++d) {
    if (!finite(extents[d]) || extents[d] <= 0.0)
      throw ConfigError("domain extents must be strictly positive");
  }
  if (!finite(source.m) || source.m < 1.0)
    throw ConfigError("source.m must be >= 1");
  switch (source.kind) {
    case SourceSpec::Kind::Constant:
      if (!finite(source.value) || source.value < 0.0)
        throw ConfigError("constant source must be nonnegative");
      break;
    case SourceSpec::Kind::RadialPower: {
      if (!finite(source.exponent) || source.exponent < 0.0)
        throw ConfigError("radial source exponent must be nonnegative");
      if (source.exponent * source.m >= static_cast<double>(dim))
        throw ConfigError(
            "radial source violates exponent*m < dim (f would not be in L^m)");
      break;
    }
    case SourceSpec::Kind::Tabulated: {
      if (source.sample_res < 1)
        throw ConfigError("tabulated source needs sample_res >= 1");
      std::size_t expect = static_cast<std::size_t>(source.sample_res) + 1;
      if (dim >= 2) expect *= static_cast<std::size_t>(source.sample_res) + 1;
      if (source.samples.size() != expect)
        throw ConfigError("tabulated source sample count does not match grid");
      for (double v : source.samples)
        if (!finite(v) || v < 0.0)
          throw ConfigError("tabulated source samples must be nonnegative");
      break;
    }
  }
}

double ProblemSpec::domain_measure() const {
  double meas = extents[0];
  if (dim >= 2) meas *= extents[1];
  return meas;
}

std::array<double, 2> ProblemSpec::center() const {
  return {extents[0] / 2.0, dim >= 2 ? extents[1] / 2.0 : 0.0};
}

double ProblemSpec::source_at(std::span<const double> x) const {
  switch (source.kind) {
    case SourceSpec::Kind::Constant:
      return source.value;
    case SourceSpec::Kind::RadialPower: {
      const auto c = center();
      double r2 = 0.0;
      for (int d = 0; d < std::min(dim, 2); ++d) {
        const double dx = x[static_cast<std::size_t>(d)] - c[static_cast<std::size_t>(d)];
        r2 += dx * dx;
      }
      const double r = std::sqrt(r2);
      if (source.exponent == 0.0) return 1.0;
      // +infinity exactly at the center; the truncation T_n caps it later.
      if (r == 0.0) return std::numeric_limits<double>::infinity();
      return std::pow(r, -source.exponent);
    }
    case SourceSpec::Kind::Tabulated: {
      const int R = source.sample_res;
      const auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
      const double tx = clamp01(x[0] / extents[0]) * R;
      int ix = std::min(static_cast<int>(tx), R - 1);
      const double fx = tx - ix;
      if (dim == 1) {
        const auto i = static_cast<std::size_t>(ix);
        return (1.0 - fx) * source.samples[i] + fx * source.samples[i + 1];
      }
      const double ty = clamp01(x[1] / extents[1]) * R;
      int iy = std::min(static_cast<int>(ty), R - 1);
      const double fy = ty - iy;
      const std::size_t stride = static_cast<std::size_t>(R) + 1;
      const auto at = [&](int i, int j) {
        return source.samples[static_cast<std::size_t>(i) * stride +
                              static_cast<std::size_t>(j)];
      };
      return (1.0 - fx) * ((1.0 - fy) * at(ix, iy) + fy * at(ix, iy + 1)) +
             fx * ((1.0 - fy) * at(ix + 1, iy) + fy * at(ix + 1, iy + 1));
    }
  }
  return 0.0;  // unreachable
}

OperatorSpec OperatorSpec::from(const ProblemSpec& spec) {
  return OperatorSpec{spec.p, spec.theta, spec.alpha, spec.alpha};
}

double coercivity_b(double alpha, double theta, double p, double t) {
  if (!finite(t) || t < 0.0)
    throw std::domain_error("coercivity_b requires finite t >= 0");
  return alpha * std::pow(1.0 + t, -theta * (p - 1.0));
}

double coercivity_b(const ProblemSpec& spec, double t) {
  return coercivity_b(spec.alpha, spec.theta, spec.p, t);
}

double coercivity_b_derivative(double alpha, double theta, double p, double t) {
  const double e = theta * (p - 1.0);
  return -alpha * e * std::pow(1.0 + t, -e - 1.0);
}

double primitive_B(const ProblemSpec& spec, double t) {
  if (!finite(t) || t < 0.0)
    throw std::domain_error("primitive_B requires finite t >= 0");
  const double a = std::pow(spec.alpha, 1.0 / (spec.p - 1.0));
  if (spec.theta == 1.0) return a * std::log1p(t);
  // expm1/log1p form: stable uniformly in theta, approaching the theta = 1
  // branch continuously instead of cancelling in pow(1+t, 1-theta) - 1.
  const double e = 1.0 - spec.theta;
  return a * std::expm1(e * std::log1p(t)) / e;
}

double inverse_B(const ProblemSpec& spec, double s) {
  if (!finite(s) || s < 0.0)
    throw std::domain_error("inverse_B requires finite s >= 0");
  const double a = std::pow(spec.alpha, 1.0 / (spec.p - 1.0));
  if (spec.theta == 1.0) return std::expm1(s / a);
  const double e = 1.0 - spec.theta;
  return std::expm1(std::log1p(s * e / a) / e);
}

double truncate_T(double n, double s) {
  if (!(n > 0.0)) throw std::domain_error("truncate_T requires n > 0");
  return std::clamp(s, -n, n);
}

double truncate_T_derivative(double n, double s) {
  return std::abs(s) <= n ? 1.0 : 0.0;
}

double regularized_h(const ProblemSpec& spec, double n, double s) {
  if (!(n > 0.0)) throw std::domain_error("regularized_h requires n > 0");
  if (s <= 0.0) return n;
  const double sing = spec.C * std::pow(s, -spec.gamma);
  return std::min(n, sing);
}

double regularized_h_derivative(const ProblemSpec& spec, double n, double s) {
  if (!(n > 0.0)) throw std::domain_error("regularized_h requires n > 0");
  if (s <= 0.0) return 0.0;
  const double sing = spec.C * std::pow(s, -spec.gamma);
  if (sing <= n)  // uncapped branch, including the cap boundary
    return -spec.gamma * spec.C * std::pow(s, -spec.gamma - 1.0);
  return 0.0;
}

double regularized_source(const ProblemSpec& spec, double n,
                          std::span<const double> x, double s) {
  for (int d = 0; d < std::min(spec.dim, 2); ++d) {
    const double xd = x[static_cast<std::size_t>(d)];
    if (!(xd >= 0.0 && xd <= spec.extents[static_cast<std::size_t>(d)]))
      throw std::domain_error("regularized_source: point outside the domain");
  }
  const double fn = truncate_T(n, spec.source_at(x));
  return fn * regularized_h(spec, n, s);
}

std::array<double, 2> flux(const OperatorSpec& op, double t,
                           const std::array<double, 2>& xi) {
  require_finite(t, "flux t");
  require_finite(xi[0], "flux xi");
  require_finite(xi[1], "flux xi");
  const double norm = std::hypot(xi[0], xi[1]);
  if (norm == 0.0) return {0.0, 0.0};
  const double b = coercivity_b(op.alpha, op.theta, op.p, std::abs(t));
  const double scale = b * std::pow(norm, op.p - 2.0);
  return {scale * xi[0], scale * xi[1]};
}

}  // namespace singelliptic
