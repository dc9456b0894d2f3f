// Core domain types and the vector field of the two-strain SVI1I2R model.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace svir {

// Compartment ordering (S, V, I1, I2, R) is the contract used by every
// matrix index, CSV column and JSON field in this library.
inline constexpr std::size_t kS = 0;
inline constexpr std::size_t kV = 1;
inline constexpr std::size_t kI1 = 2;
inline constexpr std::size_t kI2 = 3;
inline constexpr std::size_t kR = 4;
inline constexpr std::size_t kDim = 5;

using State = std::array<double, kDim>;
using StateDerivative = std::array<double, kDim>;

inline const char* compartment_name(std::size_t i) {
  static constexpr const char* names[kDim] = {"S", "V", "I1", "I2", "R"};
  return names[i];
}

inline double total_population(const State& x) {
  return x[kS] + x[kV] + x[kI1] + x[kI2] + x[kR];
}

/// The thirteen model rates. Time is measured in days and population in
/// persons; defaults are the fitted/assumed values the model ships with.
struct Parameters {
  double birth_rate = 2993.0;                    // B, persons/day
  double natural_death = 0.00003535;             // omega, 1/day
  double beta1 = 0.000000001167817614;           // original-strain transmission
  double beta2 = 0.000000007368542050;           // mutant-strain transmission
  double vaccination_rate = 0.012;               // alpha, 1/day
  double vaccine_waning = 0.005;                 // mu, 1/day
  double natural_waning = 0.0027;                // delta, 1/day
  double vaccine_efficacy = 0.9;                 // sigma, dimensionless in [0,1]
  double excess_death1 = 0.005579;               // omega1, 1/day
  double excess_death2 = 0.002286;               // omega2, 1/day
  double mutation_rate = 0.009308731535398908;   // m, 1/day
  double recovery1 = 0.0833;                     // r1, 1/day
  double recovery2 = 0.1;                        // r2, 1/day

  // Combined exit rates of the two infected compartments.
  double exit_rate1() const {
    return natural_death + excess_death1 + mutation_rate + recovery1;
  }
  double exit_rate2() const { return natural_death + excess_death2 + recovery2; }

  /// Throws std::invalid_argument if any invariant is violated
  /// (all rates >= 0, natural_death > 0, efficacy in [0,1], all finite).
  void validate() const;
};

inline void Parameters::validate() const {
  const struct {
    const char* name;
    double value;
  } fields[] = {
      {"birth_rate", birth_rate},
      {"natural_death", natural_death},
      {"beta1", beta1},
      {"beta2", beta2},
      {"vaccination_rate", vaccination_rate},
      {"vaccine_waning", vaccine_waning},
      {"natural_waning", natural_waning},
      {"vaccine_efficacy", vaccine_efficacy},
      {"excess_death1", excess_death1},
      {"excess_death2", excess_death2},
      {"mutation_rate", mutation_rate},
      {"recovery1", recovery1},
      {"recovery2", recovery2},
  };
  for (const auto& f : fields) {
    if (!std::isfinite(f.value)) {
      throw std::invalid_argument(std::string("parameter ") + f.name +
                                  " is not finite");
    }
    if (f.value < 0.0) {
      throw std::invalid_argument(std::string("parameter ") + f.name +
                                  " must be >= 0");
    }
  }
  if (natural_death <= 0.0) {
    throw std::invalid_argument("natural_death must be > 0");
  }
  if (vaccine_efficacy > 1.0) {
    throw std::invalid_argument("vaccine_efficacy must be <= 1");
  }
}

/// One integrated orbit: strictly increasing sample times, one state per
/// time, and the parameter set it was produced with.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  Parameters parameters;
};

inline void require_finite(const State& x) {
  for (std::size_t i = 0; i < kDim; ++i) {
    if (!std::isfinite(x[i])) {
      throw std::domain_error(std::string("state component ") +
                              compartment_name(i) + " is not finite");
    }
  }
}

/// Right-hand side of the model:
///   S'  = B - omega S - b1 S I1 - b2 S I2 - alpha S + mu V + delta R
///   V'  = -omega V - (1-sigma) b1 V I1 - (1-sigma) b2 V I2 + alpha S - mu V
///   I1' = -(omega + omega1 + m + r1) I1 + b1 S I1 + (1-sigma) b1 V I1
///   I2' = -(omega + omega2 + r2) I2 + m I1 + b2 S I2 + (1-sigma) b2 V I2
///   R'  = -(omega + delta) R + r1 I1 + r2 I2
inline StateDerivative rhs(const Parameters& p, const State& x) {
  require_finite(x);
  const double S = x[kS], V = x[kV], I1 = x[kI1], I2 = x[kI2], R = x[kR];
  const double leak = 1.0 - p.vaccine_efficacy;
  StateDerivative f;
  f[kS] = p.birth_rate - p.natural_death * S - p.beta1 * S * I1 -
          p.beta2 * S * I2 - p.vaccination_rate * S + p.vaccine_waning * V +
          p.natural_waning * R;
  f[kV] = -p.natural_death * V - leak * p.beta1 * V * I1 -
          leak * p.beta2 * V * I2 + p.vaccination_rate * S -
          p.vaccine_waning * V;
  f[kI1] = -p.natural_death * I1 - p.excess_death1 * I1 - p.mutation_rate * I1 -
           p.recovery1 * I1 + p.beta1 * S * I1 + leak * p.beta1 * V * I1;
  f[kI2] = -p.natural_death * I2 - p.excess_death2 * I2 + p.mutation_rate * I1 -
           p.recovery2 * I2 + p.beta2 * S * I2 + leak * p.beta2 * V * I2;
  f[kR] = -p.natural_death * R + p.recovery1 * I1 + p.recovery2 * I2 -
          p.natural_waning * R;
  return f;
}

/// (sum of rhs components) - (B - omega N - omega1 I1 - omega2 I2).
/// Identically zero in exact arithmetic; rounding leaves a residual of the
/// order of machine epsilon times the largest flow term.
inline double conservation_residual(const Parameters& p, const State& x) {
  const StateDerivative f = rhs(p, x);
  const double sum = f[kS] + f[kV] + f[kI1] + f[kI2] + f[kR];
  const double closed = p.birth_rate - p.natural_death * total_population(x) -
                        p.excess_death1 * x[kI1] - p.excess_death2 * x[kI2];
  return sum - closed;
}

/// Magnitude of the largest individual flow term; the natural scale against
/// which the conservation residual rounding should be judged.
inline double flow_scale(const Parameters& p, const State& x) {
  const double S = x[kS], V = x[kV], I1 = x[kI1], I2 = x[kI2], R = x[kR];
  const double leak = 1.0 - p.vaccine_efficacy;
  const double terms[] = {
      p.birth_rate,
      p.natural_death * total_population(x),
      p.beta1 * S * I1,
      p.beta2 * S * I2,
      p.vaccination_rate * S,
      p.vaccine_waning * V,
      p.natural_waning * R,
      leak * p.beta1 * V * I1,
      leak * p.beta2 * V * I2,
      (p.excess_death1 + p.mutation_rate + p.recovery1) * I1,
      (p.excess_death2 + p.recovery2) * I2,
  };
  double s = 1.0;
  for (double t : terms) s = std::max(s, std::abs(t));
  return s;
}

/// Biologically feasible region D: non-negative components with total
/// population at most B/omega (boundary included).
inline bool in_region(const Parameters& p, const State& x) {
  for (std::size_t i = 0; i < kDim; ++i) {
    if (!(x[i] >= 0.0)) return false;
  }
  return total_population(x) <= p.birth_rate / p.natural_death;
}

}  // namespace svir
