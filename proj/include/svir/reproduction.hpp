// Next-generation matrices and the per-strain basic reproduction numbers,
// computed along two independent routes (closed form and NGM spectrum).
#pragma once

#include <stdexcept>
#include <utility>

#include "svir/equilibria.hpp"
#include "svir/linalg.hpp"
#include "svir/model.hpp"

namespace svir {

struct NextGenerationMatrices {
  Matrix2 F{};  // new-infection Jacobian at the DFE (I1, I2 block)
  Matrix2 V{};  // transition Jacobian at the DFE
  Matrix2 K{};  // F V^-1
};

/// F is diagonal with beta_i (S0 + (1-sigma) V0); V is lower triangular with
/// the strain exit rates on the diagonal and -m below it.
inline NextGenerationMatrices ngm(const Parameters& p) {
  const double a = p.exit_rate1();
  const double d = p.exit_rate2();
  if (!(a > 0.0) || !(d > 0.0)) {
    throw std::domain_error("ngm: infected exit rates must be > 0");
  }
  const double pool = dfe_susceptible_pool(p);
  NextGenerationMatrices out;
  out.F = {{{p.beta1 * pool, 0.0}, {0.0, p.beta2 * pool}}};
  out.V = {{{a, 0.0}, {-p.mutation_rate, d}}};
  // triangular inverse: V^-1 = [[1/a, 0], [m/(a d), 1/d]]
  out.K = {{{out.F[0][0] / a, 0.0},
            {out.F[1][1] * p.mutation_rate / (a * d), out.F[1][1] / d}}};
  return out;
}

struct ReproductionNumbers {
  double r01 = 0.0;
  double r02 = 0.0;
  std::pair<double, double> from_closed_form{0.0, 0.0};
  std::pair<double, double> from_spectral{0.0, 0.0};
  NextGenerationMatrices matrices;
};

/// Closed forms:
///   R0i = beta_i B ((mu+omega) + (1-sigma) alpha) / (exit_i omega (mu+omega+alpha))
/// The spectral route reads the eigenvalues of the triangular K off its
/// diagonal; no general eigensolver is involved, so the two routes are
/// independent up to rounding.
inline ReproductionNumbers reproduction_numbers(const Parameters& p) {
  ReproductionNumbers out;
  out.matrices = ngm(p);
  const double num = p.birth_rate * ((p.vaccine_waning + p.natural_death) +
                                     (1.0 - p.vaccine_efficacy) * p.vaccination_rate);
  const double den = p.natural_death *
                     (p.vaccine_waning + p.natural_death + p.vaccination_rate);
  out.from_closed_form = {p.beta1 * num / (p.exit_rate1() * den),
                          p.beta2 * num / (p.exit_rate2() * den)};
  out.from_spectral = {out.matrices.K[0][0], out.matrices.K[1][1]};
  out.r01 = out.from_closed_form.first;
  out.r02 = out.from_closed_form.second;
  return out;
}

}  // namespace svir
