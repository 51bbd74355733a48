#include "singelliptic/estimates.hpp"

#include <cmath>
#include <limits>

#include "singelliptic/solver.hpp"

namespace singelliptic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double critical_gamma_of(const ProblemSpec& spec) {
  return spec.theta * (spec.p - 1.0) + 1.0;
}

bool is_critical(const ProblemSpec& spec) {
  const double crit = critical_gamma_of(spec);
  const double scale = std::max({1.0, std::abs(crit), std::abs(spec.gamma)});
  return std::abs(spec.gamma - crit) <= 1e-12 * scale;
}

double floor_m(double N, double p, double theta, double gamma) {
  const double denom =
      (p - 1.0) * (N * (1.0 - theta) + theta) + 1.0 + gamma * (N - 1.0);
  return std::max(1.0, N / denom);
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Bounded: return "bounded";
    case Regime::Energy: return "energy";
    case Regime::BelowEnergy: return "below_energy";
    case Regime::CriticalGamma: return "critical_gamma";
    case Regime::SupercriticalGamma: return "supercritical_gamma";
    case Regime::Uncovered: return "uncovered";
  }
  return "uncovered";
}

std::string check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::Info: return "info";
  }
  return "skipped";
}

Regime classify_regime(const ProblemSpec& spec) {
  if (is_critical(spec)) return Regime::CriticalGamma;
  const double crit = critical_gamma_of(spec);
  if (spec.gamma > crit) return Regime::SupercriticalGamma;

  const double N = static_cast<double>(spec.dim);
  const double p = spec.p;
  const double m = spec.source.m;
  if (m > N / p) return Regime::Bounded;

  // Reaching here needs m <= N/p <= N, so N > p (1D always classifies
  // bounded because m >= 1 > 1/p). kappa > 0 in the subcritical range.
  const double kappa = crit - spec.gamma;
  const double m1 = N * p / (N * p - (N - p) * kappa);
  if (m >= m1) return Regime::Energy;
  if (m >= floor_m(N, p, spec.theta, spec.gamma)) return Regime::BelowEnergy;
  return Regime::Uncovered;
}

ExponentSet exponents(const ProblemSpec& spec) {
  const double N = static_cast<double>(spec.dim);
  const double p = spec.p;
  const double theta = spec.theta;
  const double gamma = spec.gamma;
  const double m = spec.source.m;

  ExponentSet e;
  e.p_prime = p / (p - 1.0);
  e.kappa = theta * (p - 1.0) + 1.0 - gamma;
  e.m_floor = floor_m(N, p, theta, gamma);
  e.regime = classify_regime(spec);

  if (N > p) e.p_star = N * p / (N - p);
  if (e.p_star && e.kappa > 0.0) {
    const double denom = N * p - (N - p) * e.kappa;
    if (denom > 0.0) e.m1 = N * p / denom;
  }
  const double grow = (p - 1.0) * (1.0 - theta) + gamma;
  if (N - p * m > 0.0) {
    e.r = N * m * grow / (N - p * m);
    if (N > p)
      e.nu = (N * (m - 1.0) * (1.0 - theta) * (p - 1.0) +
              gamma * m * (N - p)) /
             (N - p * m);
    e.lambda = e.nu;
  }
  if (e.kappa > 0.0 && N - m * e.kappa > 0.0)
    e.sigma = N * m * grow / (N - m * e.kappa);
  return e;
}

double exponent_r(const ProblemSpec& spec) {
  const double N = static_cast<double>(spec.dim);
  if (spec.source.m >= N / spec.p)
    throw OutOfRegime("exponent r requires m < N/p");
  const auto e = exponents(spec);
  return *e.r;
}

double exponent_sigma(const ProblemSpec& spec) {
  const double N = static_cast<double>(spec.dim);
  if (spec.source.m >= N / spec.p)
    throw OutOfRegime("exponent sigma requires m < N/p");
  const auto e = exponents(spec);
  if (!e.sigma)
    throw OutOfRegime("exponent sigma requires subcritical gamma");
  return *e.sigma;
}

double linf_bound(const ProblemSpec& spec, double f_norm_m,
                  const GeometryConstants& geo) {
  const double N = static_cast<double>(spec.dim);
  const double p = spec.p;
  const double m = spec.source.m;
  if (!(m > N / p)) throw OutOfRegime("linf_bound requires m > N/p");
  if (f_norm_m < 0.0)
    throw std::domain_error("linf_bound requires a nonnegative source norm");

  const double pp = p / (p - 1.0);
  const double measure = spec.domain_measure();
  const double bracket = std::pow(spec.C, 1.0 / (p - 1.0)) *
                         std::pow(measure, pp / N - pp / (p * m)) /
                         std::pow(N * std::pow(geo.C_N, 1.0 / N), pp) *
                         (N * m * (p - 1.0) / (p * m - N)) *
                         std::pow(f_norm_m, pp / p);
  return inverse_B(spec, bracket);
}

EnergyBound energy_bound(const ProblemSpec& spec, double c_inf,
                         double f_norm_m) {
  const double b = coercivity_b(spec, c_inf);
  const double base = c_inf *
                      std::pow(spec.domain_measure(), 1.0 - 1.0 / spec.source.m) *
                      f_norm_m;
  return EnergyBound{base / std::pow(b, spec.p), base / b};
}

std::pair<double, double> power_energy_bound(const ProblemSpec& spec,
                                             double f_l1) {
  const double crit = critical_gamma_of(spec);
  if (is_critical(spec) || spec.gamma < crit)
    throw OutOfRegime("power_energy_bound requires gamma > theta(p-1)+1");
  const double e = (spec.gamma + (spec.p - 1.0) * (1.0 - spec.theta)) / spec.p;
  const double bound = f_l1 * std::pow(e, spec.p) / (spec.alpha * spec.gamma);
  return {e, bound};
}

std::optional<double> critical_energy_bound(const ProblemSpec& spec,
                                            double f_l1) {
  if (!is_critical(spec))
    throw OutOfRegime("critical_energy_bound requires gamma = theta(p-1)+1");
  if (spec.theta == 0.0) return std::nullopt;  // prefactor vanishes: unbounded
  return spec.C * f_l1 / (spec.theta * (spec.p - 1.0));
}

bool EstimateReport::all_applicable_pass() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

namespace {

CheckResult make_comparison(const std::string& name, double observed,
                            double bound, double slack,
                            const std::string& note = "") {
  CheckResult c;
  c.name = name;
  c.observed = observed;
  c.bound = bound;
  if (bound > 0.0) {
    c.margin = observed / bound;
    c.status = observed <= bound * (1.0 + slack) ? CheckStatus::Pass
                                                 : CheckStatus::Fail;
  } else {
    c.margin = observed == 0.0 ? 1.0 : kInf;
    c.status = observed == 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
  }
  c.reason = note;
  return c;
}

CheckResult make_skipped(const std::string& name, const std::string& reason) {
  CheckResult c;
  c.name = name;
  c.status = CheckStatus::Skipped;
  c.reason = reason;
  return c;
}

}  // namespace

EstimateReport verify(const ProblemSpec& spec, const SolveResult& result,
                      const GeometryConstants& geo, double slack) {
  EstimateReport rep;
  rep.regime = classify_regime(spec);
  rep.exps = exponents(spec);
  rep.slack = slack;

  const DiscreteField& u = result.field;
  const Mesh& mesh = *u.mesh;
  const auto fsrc = [&spec](std::span<const double> x) {
    return spec.source_at(x);
  };
  const double m = spec.source.m;
  // Essentially-bounded sources use the sup norm; "m = infinity" is taken as
  // a large finite exponent in the closed-form bounds, whose limits are
  // monotone.
  const double f_norm_m = m >= 1e4 ? function_lebesgue_norm(mesh, fsrc, kInf)
                                   : function_lebesgue_norm(mesh, fsrc, m);
  const double f_l1 = function_lebesgue_norm(mesh, fsrc, 1.0);

  rep.linf_observed = lebesgue_norm(u, kInf);
  rep.energy_observed = std::pow(sobolev_seminorm(u, spec.p), spec.p);

  // 1) supremum bound, bounded regime only, dimension >= 2 only.
  if (rep.regime != Regime::Bounded) {
    rep.checks.push_back(make_skipped("linf", "regime mismatch: requires m > N/p"));
  } else if (spec.dim < 2) {
    rep.checks.push_back(make_skipped("linf", "dimension mismatch"));
  } else {
    rep.c_inf = linf_bound(spec, f_norm_m, geo);
    rep.checks.push_back(
        make_comparison("linf", *rep.linf_observed, *rep.c_inf, slack));
  }

  // 2) gradient-energy bound, needs the supremum bound's constant.
  if (rep.regime != Regime::Bounded) {
    rep.checks.push_back(
        make_skipped("energy", "regime mismatch: requires m > N/p"));
  } else if (spec.dim < 2) {
    rep.checks.push_back(make_skipped("energy", "dimension mismatch"));
  } else {
    const EnergyBound eb = energy_bound(spec, *rep.c_inf, f_norm_m);
    rep.energy_printed = eb.printed;
    rep.energy_sharper = eb.sharper;
    rep.checks.push_back(make_comparison("energy", *rep.energy_observed,
                                         eb.printed, slack,
                                         "gates on the weaker printed bound"));
  }

  // 3) critical-regime energy bound (dimension-generic).
  if (rep.regime != Regime::CriticalGamma) {
    rep.checks.push_back(make_skipped(
        "critical_energy", "regime mismatch: requires gamma = theta(p-1)+1"));
  } else {
    const auto bound = critical_energy_bound(spec, f_l1);
    if (!bound) {
      rep.checks.push_back(make_skipped(
          "critical_energy", "unverifiable: theta = 0 leaves no prefactor"));
    } else {
      rep.critical_bound = *bound;
      rep.critical_observed = rep.energy_observed;
      rep.checks.push_back(make_comparison("critical_energy",
                                           *rep.critical_observed, *bound,
                                           slack));
    }
  }

  // 4) supercritical power-energy bound (dimension-generic).
  if (rep.regime != Regime::SupercriticalGamma) {
    rep.checks.push_back(make_skipped(
        "power_energy", "regime mismatch: requires gamma > theta(p-1)+1"));
  } else {
    const auto [e, bound] = power_energy_bound(spec, f_l1);
    rep.power_exponent = e;
    rep.power_bound = bound;
    rep.power_observed =
        std::pow(sobolev_seminorm(power_transform(u, e), spec.p), spec.p);
    rep.checks.push_back(
        make_comparison("power_energy", *rep.power_observed, bound, slack));
  }

  // 5) L^r summability: predicted exponent exists but carries no printed
  // constant, so the observed norm is reported as information only.
  if (!rep.exps.r) {
    rep.checks.push_back(
        make_skipped("lr_norm", "exponent undefined in this regime"));
  } else if (spec.dim < 2) {
    rep.checks.push_back(make_skipped("lr_norm", "dimension mismatch"));
  } else {
    rep.lr_norm_observed = lebesgue_norm(u, *rep.exps.r);
    CheckResult c;
    c.name = "lr_norm";
    c.status = CheckStatus::Info;
    c.observed = rep.lr_norm_observed;
    c.reason = "no closed-form constant; informational";
    rep.checks.push_back(c);
  }

  return rep;
}

}  // namespace singelliptic
