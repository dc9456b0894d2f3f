// Normalized forward sensitivity indices Z_p^Q = (p/Q) dQ/dp of the two
// reproduction numbers with respect to every model parameter, from the
// closed-form derivatives.
#pragma once

#include <array>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "svir/model.hpp"
#include "svir/reproduction.hpp"

namespace svir {

enum class SignClass { Positive, Negative, Neutral };

inline const char* sign_class_name(SignClass s) {
  switch (s) {
    case SignClass::Positive:
      return "positive";
    case SignClass::Negative:
      return "negative";
    case SignClass::Neutral:
      return "neutral";
  }
  return "unknown";
}

struct SensitivityEntry {
  std::string parameter;
  double value_used = 0.0;
  double index_r01 = 0.0;
  double index_r02 = 0.0;
  SignClass sign_r01 = SignClass::Neutral;
  SignClass sign_r02 = SignClass::Neutral;
};

struct SensitivityReport {
  std::array<SensitivityEntry, 13> entries;
};

namespace detail {

inline SignClass sign_of(double v) {
  if (v > 0.0) return SignClass::Positive;
  if (v < 0.0) return SignClass::Negative;
  return SignClass::Neutral;
}

}  // namespace detail

/// All thirteen parameters, ordered as (B, omega, beta1, beta2, alpha, mu,
/// delta, sigma, omega1, omega2, m, r1, r2). Parameters absent from a
/// reproduction-number formula carry an exact zero.
inline SensitivityReport sensitivity_indices(const Parameters& p) {
  const ReproductionNumbers r = reproduction_numbers(p);
  if (!(r.r01 > 0.0) || !(r.r02 > 0.0)) {
    throw std::domain_error(
        "sensitivity_indices: reproduction numbers must be positive");
  }
  const double om = p.natural_death, mu = p.vaccine_waning,
               al = p.vaccination_rate, sg = p.vaccine_efficacy;
  const double big_g = (mu + om) + (1.0 - sg) * al;  // (mu+omega)+(1-sigma)alpha
  const double big_h = mu + om + al;                 // mu+omega+alpha
  const double a = p.exit_rate1();
  const double d = p.exit_rate2();

  const double z_omega1 = om / big_g - om / a - 1.0 - om / big_h;
  const double z_omega2 = om / big_g - om / d - 1.0 - om / big_h;
  const double z_alpha = al * ((1.0 - sg) / big_g - 1.0 / big_h);
  const double z_mu = mu * (1.0 / big_g - 1.0 / big_h);
  const double z_sigma = -sg * al / big_g;

  SensitivityReport rep;
  auto set = [&](std::size_t i, const char* name, double value, double z1,
                 double z2) {
    rep.entries[i] = SensitivityEntry{name, value, z1, z2,
                                      detail::sign_of(z1), detail::sign_of(z2)};
  };
  set(0, "B", p.birth_rate, 1.0, 1.0);
  set(1, "omega", om, z_omega1, z_omega2);
  set(2, "beta1", p.beta1, 1.0, 0.0);
  set(3, "beta2", p.beta2, 0.0, 1.0);
  set(4, "alpha", al, z_alpha, z_alpha);
  set(5, "mu", mu, z_mu, z_mu);
  set(6, "delta", p.natural_waning, 0.0, 0.0);
  set(7, "sigma", sg, z_sigma, z_sigma);
  set(8, "omega1", p.excess_death1, -p.excess_death1 / a, 0.0);
  set(9, "omega2", p.excess_death2, 0.0, -p.excess_death2 / d);
  set(10, "m", p.mutation_rate, -p.mutation_rate / a, 0.0);
  set(11, "r1", p.recovery1, -p.recovery1 / a, 0.0);
  set(12, "r2", p.recovery2, 0.0, -p.recovery2 / d);
  return rep;
}

/// CSV export: header `parameter,value,index_r01,index_r02`, one row per
/// parameter in report order.
inline void write_sensitivity_csv(const SensitivityReport& rep,
                                  std::ostream& os) {
  os << "parameter,value,index_r01,index_r02\n";
  char buf[64];
  for (const auto& e : rep.entries) {
    os << e.parameter;
    for (double v : {e.value_used, e.index_r01, e.index_r02}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace svir
