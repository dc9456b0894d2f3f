// Local stability machinery: spectra and characteristic polynomials of model
// Jacobians, Routh-Hurwitz conditions for the quintic, classification, and
// the disease-free Lyapunov derivative.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "svir/equilibria.hpp"
#include "svir/jacobian.hpp"
#include "svir/linalg.hpp"
#include "svir/model.hpp"
#include "svir/reproduction.hpp"

namespace svir {

struct RouthHurwitzReport {
  std::array<bool, 5> coefficients_positive{};
  bool second_condition = false;  // k1 k2 k3 > k3^2 + k1^2 k4
  bool third_condition = false;   // (k1 k4 - k5)(k1 k2 k3 - k3^2 - k1^2 k4)
                                  //   > k5 (k1 k2 - k3)^2 + k1 k5^2
  bool satisfied = false;
};

/// Evaluates the three Routh-Hurwitz condition groups for
/// tau^5 + k1 tau^4 + k2 tau^3 + k3 tau^2 + k4 tau + k5.
inline RouthHurwitzReport routh_hurwitz(const std::array<double, 5>& k) {
  for (double c : k) {
    if (!std::isfinite(c)) {
      throw std::domain_error("routh_hurwitz: non-finite coefficient");
    }
  }
  RouthHurwitzReport r;
  bool all_positive = true;
  for (std::size_t i = 0; i < 5; ++i) {
    r.coefficients_positive[i] = k[i] > 0.0;
    all_positive = all_positive && r.coefficients_positive[i];
  }
  const double k1 = k[0], k2 = k[1], k3 = k[2], k4 = k[3], k5 = k[4];
  r.second_condition = k1 * k2 * k3 > k3 * k3 + k1 * k1 * k4;
  r.third_condition =
      (k1 * k4 - k5) * (k1 * k2 * k3 - k3 * k3 - k1 * k1 * k4) >
      k5 * (k1 * k2 - k3) * (k1 * k2 - k3) + k1 * k5 * k5;
  r.satisfied = all_positive && r.second_condition && r.third_condition;
  return r;
}

enum class Classification { LocallyAsymptoticallyStable, Unstable, Marginal };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::LocallyAsymptoticallyStable:
      return "locally_asymptotically_stable";
    case Classification::Unstable:
      return "unstable";
    case Classification::Marginal:
      return "marginal";
  }
  return "unknown";
}

/// Marginal when some eigenvalue's real part sits within 1e-9 of zero
/// relative to the spectral scale (threshold cases belong to the
/// bifurcation analysis, not to a stability verdict).
inline Classification classify(const std::array<Complex, 5>& eigs) {
  double scale = 0.0;
  for (const auto& e : eigs) scale = std::max(scale, std::abs(e));
  const double band = 1e-9 * std::max(scale, 1e-300);
  bool unstable = false;
  for (const auto& e : eigs) {
    if (std::abs(e.real()) <= band) return Classification::Marginal;
    if (e.real() > 0.0) unstable = true;
  }
  return unstable ? Classification::Unstable
                  : Classification::LocallyAsymptoticallyStable;
}

struct StabilityReport {
  EquilibriumPoint point;
  std::array<Complex, 5> eigenvalues{};
  std::array<double, 5> char_poly_coeffs{};
  RouthHurwitzReport routh;
  Classification classification = Classification::Marginal;
};

inline StabilityReport stability_report(const Parameters& p,
                                        const EquilibriumPoint& eq) {
  StabilityReport rep;
  rep.point = eq;
  const Matrix5 j = jacobian(p, eq.state);
  rep.eigenvalues = eigenvalues(j);
  rep.char_poly_coeffs = char_poly(j);
  rep.routh = routh_hurwitz(rep.char_poly_coeffs);
  rep.classification = classify(rep.eigenvalues);
  return rep;
}

/// Coefficients of the linear Lyapunov function L0 = C1 I1 + C2 I2 used for
/// the disease-free global stability argument. The C1 denominator vanishes
/// exactly at R01 = 1.
struct LyapunovCoefficients {
  double C1, C2;
};

inline LyapunovCoefficients dfe_lyapunov_coefficients(const Parameters& p) {
  const double a = p.exit_rate1();
  const double d = p.exit_rate2();
  const double pool_rate = p.natural_death * (p.vaccine_waning +
                                              p.natural_death +
                                              p.vaccination_rate);
  const double bracket =
      -a * pool_rate +
      p.beta1 * p.birth_rate * (p.vaccine_waning + p.natural_death) +
      (1.0 - p.vaccine_efficacy) * p.beta1 * p.vaccination_rate * p.birth_rate;
  if (bracket == 0.0) {
    throw std::domain_error(
        "dfe_lyapunov_coefficients: degenerate at R01 = 1");
  }
  LyapunovCoefficients c;
  c.C1 = 1.0 / a - p.mutation_rate * pool_rate / (d * bracket);
  c.C2 = 1.0 / d;
  return c;
}

/// dL0/dt = C1 I1' + C2 I2' evaluated with the model right-hand side.
inline double dfe_lyapunov_derivative(const Parameters& p, const State& x) {
  const LyapunovCoefficients c = dfe_lyapunov_coefficients(p);
  const StateDerivative f = rhs(p, x);
  return c.C1 * f[kI1] + c.C2 * f[kI2];
}

}  // namespace svir
