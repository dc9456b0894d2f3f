// Shared fixtures for the unit suites: the reference parameter set, random
// samplers, and independent closed-form oracles the implementation is
// checked against.
#pragma once

#include <array>
#include <cmath>
#include <random>

#include "svir/model.hpp"
#include "svir/reproduction.hpp"

namespace testsup {

inline svir::Parameters reference_parameters() { return svir::Parameters{}; }

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Log-uniform draws over epidemiologically sensible ranges; the one
/// sampler shared by all randomized suites.
class ParameterSampler {
 public:
  explicit ParameterSampler(std::uint64_t seed) : gen_(seed) {}

  svir::Parameters draw() {
    svir::Parameters p;
    p.birth_rate = log_uniform(300.0, 30000.0);
    p.natural_death = log_uniform(1e-5, 1e-4);
    p.beta1 = log_uniform(1e-10, 1e-8);
    p.beta2 = log_uniform(1e-10, 1e-8);
    p.vaccination_rate = log_uniform(1e-4, 0.1);
    p.vaccine_waning = log_uniform(1e-4, 0.05);
    p.natural_waning = log_uniform(1e-4, 0.01);
    p.vaccine_efficacy = uniform(0.0, 0.99);
    p.excess_death1 = log_uniform(1e-4, 0.01);
    p.excess_death2 = log_uniform(1e-4, 0.01);
    p.mutation_rate = log_uniform(1e-3, 0.05);
    p.recovery1 = log_uniform(0.02, 0.2);
    p.recovery2 = log_uniform(0.02, 0.2);
    return p;
  }

  /// Uniform draw from the feasible region D (Dirichlet split of a total
  /// drawn with the radial density of the simplex volume).
  svir::State state_in_region(const svir::Parameters& p) {
    std::array<double, svir::kDim> g{};
    double sum = 0.0;
    for (auto& c : g) {
      c = -std::log(uniform(1e-12, 1.0));
      sum += c;
    }
    const double total =
        (p.birth_rate / p.natural_death) * std::pow(uniform(0.0, 1.0), 0.2);
    svir::State x{};
    for (std::size_t i = 0; i < svir::kDim; ++i) x[i] = g[i] / sum * total;
    return x;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(gen_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  std::mt19937_64& gen() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Independent closed-form oracles (scalar transcriptions, no shared code
// with the implementation paths they check).
// ---------------------------------------------------------------------------
namespace oracle {

/// The five eigenvalues of the Jacobian at the disease-free equilibrium:
/// -omega, -(omega+alpha+mu), exit1 (R01 - 1), exit2 (R02 - 1), -(omega+delta).
inline std::array<double, 5> dfe_eigenvalues(const svir::Parameters& p) {
  const auto r = svir::reproduction_numbers(p);
  return {-p.natural_death,
          -(p.natural_death + p.vaccination_rate + p.vaccine_waning),
          (1.0 - r.r01) * (-p.exit_rate1()),
          (1.0 - r.r02) * (-p.exit_rate2()),
          -p.natural_death - p.natural_waning};
}

struct Strain1Pieces {
  double A1, X, Y;
};

inline Strain1Pieces strain1_pieces(const svir::Parameters& p) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, de = p.natural_waning;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double a = p.exit_rate1(), d = p.exit_rate2();
  const double r02 = svir::reproduction_numbers(p).r02;
  const double big_g = (mu + om) + leak * al;
  Strain1Pieces out;
  out.A1 = om * (mu + om + al) * d;
  out.X = a * (mu + om) * (om + de) * (1.0 - r02) * out.A1 +
          p.beta2 * p.birth_rate * (mu + om) * p.mutation_rate * (om + de) * big_g -
          de * (p.recovery1 * (1.0 - r02) * out.A1 +
                p.recovery2 * p.mutation_rate * om * (mu + om + al)) * big_g;
  out.Y = a * leak * al * (1.0 - r02) * out.A1 +
          leak * p.beta2 * al * p.birth_rate * p.mutation_rate * big_g;
  return out;
}

/// Closed-form right null vector for the strain-1 bifurcation,
/// normalized so the I2 component equals omega (mu+omega+alpha).
inline std::array<double, 5> strain1_w(const svir::Parameters& p) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, de = p.natural_waning;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double m = p.mutation_rate;
  const double r02 = svir::reproduction_numbers(p).r02;
  const Strain1Pieces pc = strain1_pieces(p);
  const double big_g = (mu + om) + leak * al;
  const double den = m * (om + de) * big_g * (-om * (om + mu + al));
  return {((om + mu) * pc.X + mu * (om + de) * pc.Y) / den,
          (al * pc.X + (om + al) * (om + de) * pc.Y) / den,
          (1.0 - r02) * pc.A1 / m,
          om * (mu + om + al),
          (p.recovery1 * (1.0 - r02) * pc.A1 +
           p.recovery2 * m * om * (mu + om + al)) / (m * (om + de))};
}

/// Closed-form right null vector for strain 2, I2 component normalized to 1.
inline std::array<double, 5> strain2_w(const svir::Parameters& p) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, de = p.natural_waning;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double d = p.exit_rate2(), r2 = p.recovery2;
  const double big_g = (mu + om) + leak * al;
  const double den = (-om * (om + mu + al)) * big_g * (om + de);
  const double w11 = (d * (mu + om) * (mu + om) * (om + de) -
                      (om + mu) * de * r2 * big_g +
                      mu * d * leak * al * (om + de)) / den;
  const double w22 = (al * d * (mu + om) * (om + de) - al * de * r2 * big_g +
                      (om + al) * d * leak * al * (om + de)) / den;
  return {w11, w22, 0.0, 1.0, r2 / (om + de)};
}

/// Closed-form left null vector for strain 2 (v33 component; v44 = 1).
inline std::array<double, 5> strain2_v(const svir::Parameters& p) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double a = p.exit_rate1();
  const double v33 =
      -p.mutation_rate * om * (mu + om + al) /
      (-a * om * (mu + om + al) +
       p.beta1 * p.birth_rate * ((mu + om) + al * leak));
  return {0.0, 0.0, v33, 1.0, 0.0};
}

/// Closed-form normal-form constant a for strain 1 (term-by-term expansion
/// of 2 beta1* w3 (w1 + (1-sigma) w2) via the pieces above).
inline double strain1_a(const svir::Parameters& p) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, de = p.natural_waning;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double a = p.exit_rate1(), m = p.mutation_rate, B = p.birth_rate;
  const double r02 = svir::reproduction_numbers(p).r02;
  const double a1 = om * (mu + om + al) * p.exit_rate2();
  const double big_g = (mu + om) + leak * al;
  const double big_e = mu + leak * (om + al);
  const double w5 = strain1_w(p)[4];
  const double t1 =
      -(1.0 - r02) * (1.0 - r02) * a1 * a1 * a * a * (mu + om) / (m * m * B * big_g);
  const double t2 = -(1.0 - r02) * a1 * a * (mu + om) * p.beta2 / m;
  const double t3 = -big_e * a * a * leak * al * (1.0 - r02) * (1.0 - r02) *
                    a1 * a1 / (m * m * B * big_g * big_g);
  const double t4 =
      -big_e * leak * p.beta2 * al * (1.0 - r02) * a1 * a / (m * big_g);
  const double t5 = de * (1.0 - r02) * a1 * a * w5 / (m * B);
  return 2.0 * (t1 + t2 + t3 + t4 + t5);
}

/// Closed-form normal-form constant a for strain 2.
inline double strain2_a(const svir::Parameters& p) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, de = p.natural_waning;
  const double leak = 1.0 - p.vaccine_efficacy;
  const double d = p.exit_rate2(), B = p.birth_rate;
  const double big_g = (mu + om) + leak * al;
  const double big_e = mu + (om + al) * leak;
  const double w55 = p.recovery2 / (om + de);
  const double t1 = -d * (d * (mu + om) * big_g + d * leak * al * big_e) /
                    (B * big_g * big_g);
  const double t2 = de * w55 * d / B;
  return 2.0 * (t1 + t2);
}

/// Closed-form b: S0 + (1-sigma) V0 for strain 2; that times w3 for strain 1.
inline double closed_b(const svir::Parameters& p, int strain) {
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate;
  const double pool = p.birth_rate * ((mu + om) + (1.0 - p.vaccine_efficacy) * al) /
                      (om * (mu + om + al));
  if (strain == 2) return pool;
  return strain1_w(p)[2] * pool;
}

}  // namespace oracle

/// Reference parameters shifted into a backward-bifurcation-capable corner
/// (vaccine-dominated inflow, no vaccine waning, no mutant excess death).
inline svir::Parameters backward_regime_strain2() {
  svir::Parameters p;
  p.vaccine_waning = 0.0;
  p.vaccination_rate = 3.535e-4;
  p.excess_death2 = 0.0;
  return p;
}

/// Same corner with the mutant transmission lowered so R02 < 1, where the
/// strain-1 threshold analysis applies.
inline svir::Parameters backward_regime_strain1() {
  svir::Parameters p = backward_regime_strain2();
  p.beta2 = 2e-9;
  return p;
}

}  // namespace testsup
