// JSON (de)serialization for the core domain types.
#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "svir/model.hpp"

namespace svir {

using json = nlohmann::json;

inline json to_json(const Parameters& p) {
  return json{{"birth_rate", p.birth_rate},
              {"natural_death", p.natural_death},
              {"beta1", p.beta1},
              {"beta2", p.beta2},
              {"vaccination_rate", p.vaccination_rate},
              {"vaccine_waning", p.vaccine_waning},
              {"natural_waning", p.natural_waning},
              {"vaccine_efficacy", p.vaccine_efficacy},
              {"excess_death1", p.excess_death1},
              {"excess_death2", p.excess_death2},
              {"mutation_rate", p.mutation_rate},
              {"recovery1", p.recovery1},
              {"recovery2", p.recovery2}};
}

inline double* parameter_field(Parameters& p, const std::string& name) {
  if (name == "birth_rate") return &p.birth_rate;
  if (name == "natural_death") return &p.natural_death;
  if (name == "beta1") return &p.beta1;
  if (name == "beta2") return &p.beta2;
  if (name == "vaccination_rate") return &p.vaccination_rate;
  if (name == "vaccine_waning") return &p.vaccine_waning;
  if (name == "natural_waning") return &p.natural_waning;
  if (name == "vaccine_efficacy") return &p.vaccine_efficacy;
  if (name == "excess_death1") return &p.excess_death1;
  if (name == "excess_death2") return &p.excess_death2;
  if (name == "mutation_rate") return &p.mutation_rate;
  if (name == "recovery1") return &p.recovery1;
  if (name == "recovery2") return &p.recovery2;
  return nullptr;
}

/// Applies a flat JSON object of overrides onto `p`. Unknown keys are errors.
inline void apply_parameter_overrides(Parameters& p, const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("parameters must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    double* field = parameter_field(p, key);
    if (field == nullptr) {
      throw std::invalid_argument("unknown parameter key: " + key);
    }
    if (!value.is_number()) {
      throw std::invalid_argument("parameter " + key + " must be a number");
    }
    *field = value.get<double>();
  }
}

inline Parameters parameters_from_json(const json& j) {
  Parameters p;
  if (!j.is_object()) {
    throw std::invalid_argument("parameters must be a JSON object");
  }
  // Full document: every key must be known; absent keys keep defaults.
  apply_parameter_overrides(p, j);
  p.validate();
  return p;
}

inline json to_json(const State& x) {
  return json{{"S", x[kS]}, {"V", x[kV]}, {"I1", x[kI1]},
              {"I2", x[kI2]}, {"R", x[kR]}};
}

inline State state_from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("state must be a JSON object");
  }
  State x{};
  bool seen[kDim] = {false, false, false, false, false};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::size_t i = 0; i < kDim; ++i) {
      if (key == compartment_name(i)) {
        x[i] = value.get<double>();
        seen[i] = true;
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown state key: " + key);
    }
  }
  for (std::size_t i = 0; i < kDim; ++i) {
    if (!seen[i]) {
      throw std::invalid_argument(std::string("state is missing component ") +
                                  compartment_name(i));
    }
  }
  return x;
}

}  // namespace svir
