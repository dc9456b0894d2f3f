// Disease-free equilibrium in closed form and the endemic equilibrium by
// damped Newton iteration on the full five-dimensional system.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "svir/integrate.hpp"
#include "svir/jacobian.hpp"
#include "svir/linalg.hpp"
#include "svir/model.hpp"

namespace svir {

// Reference initial conditions (persons at t = 0) used as the default
// starting point for simulations and for the endemic solver's default guess.
inline constexpr State kReferenceInitialState = {26195740.0, 51202223.0,
                                                 269725.0, 2724.0, 7009861.0};

enum class EquilibriumKind { DiseaseFree, Endemic };

struct EquilibriumPoint {
  EquilibriumKind kind = EquilibriumKind::DiseaseFree;
  State state{};
  double residual_norm = 0.0;  // max-norm of rhs at state, persons/day
  // C = omega + (1-sigma) beta1 I1* + (1-sigma) beta2 I2* + mu (endemic only)
  double aux_C = std::numeric_limits<double>::quiet_NaN();
  bool strain2_only = false;  // endemic with I1* = 0, sustained by strain 2
};

inline double residual_max_norm(const Parameters& p, const State& x) {
  const StateDerivative f = rhs(p, x);
  double r = 0.0;
  for (double v : f) r = std::max(r, std::abs(v));
  return r;
}

/// E0 = (S0, V0, 0, 0, 0) with S0 = B(mu+omega)/(omega(mu+omega+alpha)) and
/// V0 = alpha B/(omega(mu+omega+alpha)).
inline EquilibriumPoint disease_free(const Parameters& p) {
  if (!(p.natural_death > 0.0)) {
    throw std::domain_error("disease_free: natural_death must be > 0");
  }
  const double pool = p.vaccine_waning + p.natural_death + p.vaccination_rate;
  if (!(pool > 0.0)) {
    throw std::domain_error("disease_free: mu + omega + alpha must be > 0");
  }
  const double den = p.natural_death * pool;
  EquilibriumPoint eq;
  eq.kind = EquilibriumKind::DiseaseFree;
  eq.state = {p.birth_rate * (p.vaccine_waning + p.natural_death) / den,
              p.vaccination_rate * p.birth_rate / den, 0.0, 0.0, 0.0};
  eq.residual_norm = residual_max_norm(p, eq.state);
  return eq;
}

/// S* + (1-sigma) V* at the disease-free equilibrium; the effective
/// susceptible pool seen by either strain.
inline double dfe_susceptible_pool(const Parameters& p) {
  const EquilibriumPoint e0 = disease_free(p);
  return e0.state[kS] + (1.0 - p.vaccine_efficacy) * e0.state[kV];
}

/// The closed-form S*, V*, R* (and C) implied by stationarity given the two
/// infected levels; the cross-validation contract for the Newton solver.
struct EndemicClosedForm {
  double S, V, R, C;
};

inline EndemicClosedForm endemic_closed_form(const Parameters& p, double I1s,
                                             double I2s) {
  const double leak = 1.0 - p.vaccine_efficacy;
  const double C = p.natural_death + leak * p.beta1 * I1s +
                   leak * p.beta2 * I2s + p.vaccine_waning;
  const double od = p.natural_death + p.natural_waning;
  const double num = p.birth_rate * od +
                     p.natural_waning * (p.recovery1 * I1s + p.recovery2 * I2s);
  const double den =
      od * ((p.natural_death + p.beta1 * I1s + p.beta2 * I2s +
             p.vaccination_rate) * C - p.vaccine_waning * p.vaccination_rate);
  EndemicClosedForm cf;
  cf.C = C;
  cf.S = num * C / den;
  cf.V = num * p.vaccination_rate / den;
  cf.R = (p.recovery1 * I1s + p.recovery2 * I2s) / od;
  return cf;
}

enum class EndemicStatus { Converged, DfeCoincident, NoConvergence };

struct EndemicResult {
  EndemicStatus status = EndemicStatus::NoConvergence;
  std::optional<EquilibriumPoint> point;
  int iterations = 0;

  bool found() const { return status == EndemicStatus::Converged; }
};

namespace detail {

// Infected levels below this many persons count as extinct when classifying
// the solver's answer.
inline constexpr double kInfectedZero = 1e-9;

inline State default_endemic_guess(const Parameters& p) {
  IntegratorConfig cfg;
  cfg.method = Method::DormandPrince45;
  cfg.t_end = 20000.0;
  cfg.output_step = 20000.0;
  cfg.h_max = 25.0;
  return integrate(p, kReferenceInitialState, cfg).states.back();
}

}  // namespace detail

/// Damped Newton on rhs(p, x) = 0. Convergence: residual max-norm at or
/// below 1e-10 * max(1, B); step halving up to 30 times per iteration; at
/// most 200 iterations. A converged point with both infected compartments
/// below 1e-9 persons is reported as DfeCoincident rather than Endemic.
inline EndemicResult endemic(const Parameters& p,
                             std::optional<State> guess = std::nullopt) {
  p.validate();
  State x = guess ? *guess : detail::default_endemic_guess(p);
  const double tol = 1e-10 * std::max(1.0, p.birth_rate);

  EndemicResult result;
  double res = residual_max_norm(p, x);
  for (int iter = 0; iter < 200; ++iter) {
    result.iterations = iter;
    if (res <= tol) break;
    StateDerivative f = rhs(p, x);
    std::array<double, kDim> neg_f;
    for (std::size_t i = 0; i < kDim; ++i) neg_f[i] = -f[i];
    std::array<double, kDim> step;
    try {
      step = solve<kDim>(fd_jacobian(p, x), neg_f);
    } catch (const NumericError&) {
      return result;  // singular Jacobian: no convergence
    }
    double lambda = 1.0;
    bool improved = false;
    for (int halvings = 0; halvings < 30; ++halvings, lambda *= 0.5) {
      State trial;
      for (std::size_t i = 0; i < kDim; ++i) trial[i] = x[i] + lambda * step[i];
      bool finite = true;
      for (double v : trial) finite = finite && std::isfinite(v);
      if (!finite) continue;
      const double trial_res = residual_max_norm(p, trial);
      if (trial_res < res) {
        x = trial;
        res = trial_res;
        improved = true;
        break;
      }
    }
    if (!improved) return result;  // stagnated
  }
  if (res > tol) return result;

  // polish away solver dust so the state satisfies the non-negativity
  // invariant exactly
  for (std::size_t i = 0; i < kDim; ++i) {
    if (std::abs(x[i]) <= detail::kInfectedZero) x[i] = 0.0;
  }
  if (std::any_of(x.begin(), x.end(), [](double v) { return v < 0.0; })) {
    return result;  // converged to a point outside the feasible orthant
  }
  res = residual_max_norm(p, x);

  if (x[kI1] < detail::kInfectedZero && x[kI2] < detail::kInfectedZero) {
    result.status = EndemicStatus::DfeCoincident;
    return result;
  }

  EquilibriumPoint eq;
  eq.kind = EquilibriumKind::Endemic;
  eq.state = x;
  eq.residual_norm = res;
  const double leak = 1.0 - p.vaccine_efficacy;
  eq.aux_C = p.natural_death + leak * p.beta1 * x[kI1] +
             leak * p.beta2 * x[kI2] + p.vaccine_waning;
  eq.strain2_only = x[kI1] < detail::kInfectedZero;
  result.status = EndemicStatus::Converged;
  result.point = eq;
  return result;
}

}  // namespace svir
