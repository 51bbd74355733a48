#pragma once
// Closed-form exponents, a-priori bounds, and the report that verifies a
// computed solution against them. Everything here is pure arithmetic on the
// problem parameters (N, p, theta, gamma, m, |Omega|) plus norms of the
// computed field; nothing touches the solver.

#include <optional>
#include <string>
#include <vector>

#include "singelliptic/grid.hpp"
#include "singelliptic/model.hpp"
#include "singelliptic/rearrange.hpp"

namespace singelliptic {

struct SolveResult;  // defined in solver.hpp

/// Parameter regimes, classified with precedence: the critical relation
/// gamma = theta(p-1)+1 first (relative tolerance 1e-12), then gamma above
/// it, then the summability of the source decides among the subcritical
/// regimes. `Uncovered` means subcritical gamma with m below the admissible
/// floor, where no statement applies.
enum class Regime {
  Bounded,             // m > N/p: solutions bounded
  Energy,              // m1 <= m < N/p: finite p-energy, L^r summability
  BelowEnergy,         // floor <= m < m1: only W^{1,sigma}, sigma < p
  CriticalGamma,       // gamma = theta(p-1)+1
  SupercriticalGamma,  // gamma > theta(p-1)+1: only a power has finite energy
  Uncovered,
};

std::string regime_name(Regime r);

/// Derived exponents for one parameter tuple. Entries whose defining formula
/// is not applicable (nonpositive denominator, N <= p, wrong regime) are
/// absent rather than NaN.
struct ExponentSet {
  std::optional<double> p_star;  // Np/(N-p), only for N > p
  double p_prime = 0.0;          // p/(p-1)
  double kappa = 0.0;            // theta(p-1) + 1 - gamma
  std::optional<double> m1;      // Np / (Np - (N-p) kappa), subcritical only
  std::optional<double> r;       // Nm[(p-1)(1-theta)+gamma] / (N - pm)
  std::optional<double> sigma;   // Nm[(p-1)(1-theta)+gamma] / (N - m kappa)
  std::optional<double> nu;      // [N(m-1)(1-theta)(p-1)+gamma m(N-p)]/(N-pm)
  std::optional<double> lambda;  // same formula as nu
  double m_floor = 1.0;          // max(1, N/((p-1)[N(1-theta)+theta]+1+gamma(N-1)))
  Regime regime = Regime::Uncovered;
};

Regime classify_regime(const ProblemSpec& spec);

/// All exponents defined for this tuple; never throws, absent where undefined.
ExponentSet exponents(const ProblemSpec& spec);

/// Direct accessors that insist on the exponent being defined:
/// m >= N/p makes r and sigma undefined and raises OutOfRegime.
double exponent_r(const ProblemSpec& spec);
double exponent_sigma(const ProblemSpec& spec);

/// Predicted supremum bound for the bounded regime (m > N/p):
///   c_inf = Binv[ C^{1/(p-1)} |Omega|^{p'/N - p'/(pm)} / (N C_N^{1/N})^{p'}
///                 * (N m (p-1)/(pm - N)) * ||f||_m^{p'/p} ].
/// Throws OutOfRegime when m <= N/p.
double linf_bound(const ProblemSpec& spec, double f_norm_m,
                  const GeometryConstants& geo);

/// Gradient-energy bound for the bounded regime. `printed` carries
/// b^p(c_inf) in the denominator and gates pass/fail; `sharper` carries a
/// single power b(c_inf) (the two coincide for p-independent b == 1).
struct EnergyBound {
  double printed = 0.0;
  double sharper = 0.0;
};
EnergyBound energy_bound(const ProblemSpec& spec, double c_inf,
                         double f_norm_m);

/// Supercritical regime (gamma > theta(p-1)+1): the power u^e with
/// e = (gamma + (p-1)(1-theta))/p has p-energy at most
/// f_l1 * e^p / (alpha gamma). Throws OutOfRegime otherwise.
std::pair<double, double> power_energy_bound(const ProblemSpec& spec,
                                             double f_l1);

/// Critical regime (gamma = theta(p-1)+1): p-energy bound
/// C f_l1 / (theta (p-1)). For theta = 0 the prefactor vanishes and no bound
/// exists; the absent optional is that "unbounded" marker. Throws
/// OutOfRegime outside the critical regime.
std::optional<double> critical_energy_bound(const ProblemSpec& spec,
                                            double f_l1);

enum class CheckStatus { Pass, Fail, Skipped, Info };

std::string check_status_name(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  std::optional<double> observed;
  std::optional<double> bound;
  std::optional<double> margin;  // observed / bound where both exist
  std::string reason;            // skip reason or short note
};

struct EstimateReport {
  Regime regime = Regime::Uncovered;
  ExponentSet exps;
  double slack = 0.05;
  std::optional<double> c_inf;
  std::optional<double> linf_observed;
  std::optional<double> energy_printed;
  std::optional<double> energy_sharper;
  std::optional<double> energy_observed;
  std::optional<double> lr_norm_observed;  // informational, no constant
  std::optional<double> power_exponent;
  std::optional<double> power_bound;
  std::optional<double> power_observed;
  std::optional<double> critical_bound;  // absent = unbounded (theta = 0)
  std::optional<double> critical_observed;
  std::vector<CheckResult> checks;  // fixed order: linf, energy,
                                    // critical_energy, power_energy, lr_norm
  bool all_applicable_pass() const;
};

/// Evaluates every applicable bound against the computed solution with the
/// given multiplicative slack. Checks that do not apply (wrong regime, or a
/// constant that needs N >= 2 evaluated on a 1D run) are marked skipped with
/// the reason; the L^r norm has no closed-form constant and is informational.
EstimateReport verify(const ProblemSpec& spec, const SolveResult& result,
                      const GeometryConstants& geo, double slack = 0.05);

}  // namespace singelliptic
