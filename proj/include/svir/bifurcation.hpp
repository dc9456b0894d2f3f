// Castillo-Chavez & Song bifurcation analysis at R0i = 1: critical
// transmission rates, null eigenvectors of the Jacobian at the disease-free
// equilibrium, the normal-form constants a and b, and the waning-rate
// threshold delta* separating forward from backward bifurcation.
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

enum class Strain : int { Original = 1, Mutant = 2 };

struct DegenerateBifurcation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Critical transmission rate of the given strain: the value at which that
/// strain's reproduction number equals one,
///   beta_i* = omega exit_i (mu+omega+alpha) / (B ((mu+omega)+(1-sigma)alpha)).
inline double beta_star(const Parameters& p, Strain strain) {
  if (!(p.birth_rate > 0.0)) {
    throw std::domain_error("beta_star: birth_rate must be > 0");
  }
  const double big_g = (p.vaccine_waning + p.natural_death) +
                       (1.0 - p.vaccine_efficacy) * p.vaccination_rate;
  if (!(big_g > 0.0)) {
    throw std::domain_error("beta_star: susceptible inflow pool vanishes");
  }
  const double exit =
      (strain == Strain::Original) ? p.exit_rate1() : p.exit_rate2();
  return p.natural_death * exit *
         (p.vaccine_waning + p.natural_death + p.vaccination_rate) /
         (p.birth_rate * big_g);
}

/// Returns a copy of p with the chosen strain's transmission rate moved to
/// its critical value.
inline Parameters at_beta_star(const Parameters& p, Strain strain) {
  Parameters pb = p;
  if (strain == Strain::Original) {
    pb.beta1 = beta_star(p, strain);
  } else {
    pb.beta2 = beta_star(p, strain);
  }
  return pb;
}

struct NullEigenvectors {
  std::array<double, kDim> w{};  // right null vector, paper normalization
  std::array<double, kDim> v{};  // left null vector, paper normalization
  double residual = 0.0;         // max of ||J w||/||w||, ||J^T v||/||v||
  double vw = 0.0;               // inner product under the normalization
};

namespace detail {

inline double two_norm(const std::array<double, kDim>& x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

}  // namespace detail

/// Right and left null vectors of J(E0, beta*). Normalization follows the
/// reference convention: strain 1 scales w so its I2 component equals
/// omega (mu+omega+alpha) and v so its I1 component is 1; strain 2 scales
/// both w and v so their I2 components are 1.
inline NullEigenvectors null_eigenvectors(const Parameters& p, Strain strain) {
  const Parameters pb = at_beta_star(p, strain);
  const Matrix5 j = jacobian(pb, disease_free(pb).state);
  const double jnorm = frobenius_norm(j);

  const auto eigs = eigenvalues(j);
  int near_zero = 0;
  for (const auto& e : eigs) {
    if (std::abs(e) <= 1e-8 * jnorm) ++near_zero;
  }
  if (near_zero != 1) {
    throw DegenerateBifurcation(
        "null_eigenvectors: zero eigenvalue of J(E0, beta*) is not simple");
  }

  NullEigenvectors out;
  out.w = null_vector(j);
  out.v = null_vector(transpose(j));

  const auto jw = multiply(j, out.w);
  const auto jtv = multiply(transpose(j), out.v);
  out.residual = std::max(detail::two_norm(jw) / detail::two_norm(out.w),
                          detail::two_norm(jtv) / detail::two_norm(out.v));

  const double w_pivot = out.w[kI2];
  const double v_pivot = (strain == Strain::Original) ? out.v[kI1] : out.v[kI2];
  if (w_pivot == 0.0 || v_pivot == 0.0) {
    throw DegenerateBifurcation("null_eigenvectors: zero pivot component");
  }
  const double w_target =
      (strain == Strain::Original)
          ? p.natural_death * (p.vaccine_waning + p.natural_death +
                               p.vaccination_rate)
          : 1.0;
  for (auto& c : out.w) c *= w_target / w_pivot;
  for (auto& c : out.v) c /= v_pivot;
  for (std::size_t i = 0; i < kDim; ++i) out.vw += out.v[i] * out.w[i];
  if (out.vw == 0.0) {
    throw DegenerateBifurcation("null_eigenvectors: v.w vanished");
  }
  return out;
}

struct BifurcationConstants {
  double a = 0.0;
  double b = 0.0;
};

/// The normal-form constants of the center-manifold reduction at beta*,
///   a = sum_k v_k sum_{i,j} w_i w_j d2 f_k / dx_i dx_j
///   b = sum_k v_k sum_i   w_i d2 f_k / dx_i dphi,   phi = beta_strain.
/// All second state derivatives are constants (transmission is bilinear),
/// so the sums are evaluated exactly.
inline BifurcationConstants bifurcation_constants(const Parameters& p,
                                                  Strain strain) {
  const NullEigenvectors nv = null_eigenvectors(p, strain);
  const Parameters pb = at_beta_star(p, strain);
  const double leak = 1.0 - pb.vaccine_efficacy;

  // nonzero Hessian entries d2 f_k/dx_i dx_j, symmetric in (i, j)
  struct Entry {
    std::size_t k, i, j;
    double value;
  };
  const Entry hessian[] = {
      {kS, kS, kI1, -pb.beta1},        {kS, kS, kI2, -pb.beta2},
      {kV, kV, kI1, -leak * pb.beta1}, {kV, kV, kI2, -leak * pb.beta2},
      {kI1, kS, kI1, pb.beta1},        {kI1, kV, kI1, leak * pb.beta1},
      {kI2, kS, kI2, pb.beta2},        {kI2, kV, kI2, leak * pb.beta2},
  };

  BifurcationConstants out;
  for (const Entry& e : hessian) {
    out.a += 2.0 * nv.v[e.k] * nv.w[e.i] * nv.w[e.j] * e.value;
  }

  const EquilibriumPoint e0 = disease_free(pb);
  const double s0 = e0.state[kS], v0 = e0.state[kV];
  const std::size_t infected = (strain == Strain::Original) ? kI1 : kI2;
  // d2 f_k / dx_infected dbeta_strain at the DFE
  out.b = nv.v[kS] * nv.w[infected] * (-s0) +
          nv.v[kV] * nv.w[infected] * (-leak * v0) +
          nv.v[infected] * nv.w[infected] * (s0 + leak * v0);
  return out;
}

/// The immunity-waning threshold of the backward-bifurcation condition,
/// evaluated literally at the given parameters (w5 is computed from p,
/// including its own delta). The sign contract, exact by construction, is
///   sign(a(p)) = sign(p.natural_waning - delta_star(p))
/// for strain 2 unconditionally, and for strain 1 whenever
/// (1 - R02) * w5 > 0 (the regime in which the threshold is derived).
inline double delta_star(const Parameters& p, Strain strain) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, de = p.natural_waning;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double big_g = (mu + om) + leak * al;
  const double big_e = mu + leak * (om + al);
  const double d = p.exit_rate2();

  if (strain == Strain::Mutant) {
    const double w55 = p.recovery2 / (om + de);
    if (w55 == 0.0) {
      throw DegenerateBifurcation("delta_star: w55 vanishes (r2 = 0)");
    }
    const double bracket =
        (d * (mu + om) * big_g + d * leak * al * big_e) / (big_g * big_g);
    return bracket / w55;
  }

  const double a = p.exit_rate1();
  const double m = p.mutation_rate;
  if (m == 0.0) {
    throw DegenerateBifurcation("delta_star: strain 1 requires mutation_rate > 0");
  }
  const double r02 = reproduction_numbers(p).r02;
  const double a1 = om * (mu + om + al) * d;
  const double w5 = (p.recovery1 * (1.0 - r02) * a1 +
                     p.recovery2 * m * om * (mu + om + al)) /
                    (m * (om + de));
  if (w5 == 0.0) {
    throw DegenerateBifurcation("delta_star: w5 vanishes");
  }
  const double bracket =
      (1.0 - r02) * a1 * a * (mu + om) / (m * big_g) +
      (mu + om) * p.beta2 * p.birth_rate +
      big_e * a * leak * al * (1.0 - r02) * a1 / (m * big_g * big_g) +
      big_e * leak * p.beta2 * al * p.birth_rate / big_g;
  return bracket / w5;
}

enum class Regime { Forward, Backward };

struct BifurcationReport {
  Strain strain = Strain::Original;
  double beta_star = 0.0;
  std::array<double, kDim> right_eigenvector{};
  std::array<double, kDim> left_eigenvector{};
  double a = 0.0;
  double b = 0.0;
  double delta_star = 0.0;
  Regime regime = Regime::Forward;
  double zero_eigenvalue_residual = 0.0;
  double vw = 0.0;  // recorded normalization inner product
};

/// Backward exactly when a > 0 and b > 0 under the recorded normalization.
inline BifurcationReport bifurcation_report(const Parameters& p, Strain strain) {
  BifurcationReport rep;
  rep.strain = strain;
  rep.beta_star = beta_star(p, strain);
  const NullEigenvectors nv = null_eigenvectors(p, strain);
  rep.right_eigenvector = nv.w;
  rep.left_eigenvector = nv.v;
  rep.zero_eigenvalue_residual = nv.residual;
  rep.vw = nv.vw;
  const BifurcationConstants ab = bifurcation_constants(p, strain);
  rep.a = ab.a;
  rep.b = ab.b;
  rep.delta_star = delta_star(p, strain);
  rep.regime = (ab.a > 0.0 && ab.b > 0.0) ? Regime::Backward : Regime::Forward;
  return rep;
}

}  // namespace svir
