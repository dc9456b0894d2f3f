// Analytic and finite-difference Jacobians of the model vector field.
#pragma once

#include <cmath>

#include "svir/linalg.hpp"
#include "svir/model.hpp"

namespace svir {

/// Analytic partial derivatives of rhs() with respect to (S, V, I1, I2, R).
inline Matrix5 jacobian(const Parameters& p, const State& x) {
  const double S = x[kS], V = x[kV], I1 = x[kI1], I2 = x[kI2];
  const double leak = 1.0 - p.vaccine_efficacy;
  Matrix5 j{};
  j[kS][kS] = -p.natural_death - p.beta1 * I1 - p.beta2 * I2 - p.vaccination_rate;
  j[kS][kV] = p.vaccine_waning;
  j[kS][kI1] = -p.beta1 * S;
  j[kS][kI2] = -p.beta2 * S;
  j[kS][kR] = p.natural_waning;

  j[kV][kS] = p.vaccination_rate;
  j[kV][kV] = -p.natural_death - leak * p.beta1 * I1 - leak * p.beta2 * I2 -
              p.vaccine_waning;
  j[kV][kI1] = -leak * p.beta1 * V;
  j[kV][kI2] = -leak * p.beta2 * V;

  j[kI1][kS] = p.beta1 * I1;
  j[kI1][kV] = leak * p.beta1 * I1;
  j[kI1][kI1] = -p.exit_rate1() + p.beta1 * S + leak * p.beta1 * V;

  j[kI2][kS] = p.beta2 * I2;
  j[kI2][kV] = leak * p.beta2 * I2;
  j[kI2][kI1] = p.mutation_rate;
  j[kI2][kI2] = -p.exit_rate2() + p.beta2 * S + leak * p.beta2 * V;

  j[kR][kI1] = p.recovery1;
  j[kR][kI2] = p.recovery2;
  j[kR][kR] = -p.natural_death - p.natural_waning;
  return j;
}

/// Central finite differences with step 1e-5 * max(1, |x_i|); the independent
/// oracle against which the analytic Jacobian is verified.
inline Matrix5 fd_jacobian(const Parameters& p, const State& x) {
  Matrix5 j{};
  for (std::size_t col = 0; col < kDim; ++col) {
    const double step = 1e-5 * std::max(1.0, std::abs(x[col]));
    State xp = x, xm = x;
    xp[col] += step;
    xm[col] -= step;
    const StateDerivative fp = rhs(p, xp);
    const StateDerivative fm = rhs(p, xm);
    for (std::size_t row = 0; row < kDim; ++row) {
      j[row][col] = (fp[row] - fm[row]) / (2.0 * step);
    }
  }
  return j;
}

}  // namespace svir
