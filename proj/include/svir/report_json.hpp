// JSON views of the analysis reports (matrices serialized row-major).
#pragma once

#include "json.hpp"
#include "svir/bifurcation.hpp"
#include "svir/calibration.hpp"
#include "svir/equilibria.hpp"
#include "svir/reproduction.hpp"
#include "svir/sensitivity.hpp"
#include "svir/serialize.hpp"
#include "svir/stability.hpp"

namespace svir {

inline json to_json(const Matrix2& m) {
  return json::array({json::array({m[0][0], m[0][1]}),
                      json::array({m[1][0], m[1][1]})});
}

inline json to_json(const EquilibriumPoint& eq) {
  json j{{"kind", eq.kind == EquilibriumKind::DiseaseFree ? "disease_free"
                                                          : "endemic"},
         {"state", to_json(eq.state)},
         {"residual_norm", eq.residual_norm}};
  if (eq.kind == EquilibriumKind::Endemic) {
    j["aux_C"] = eq.aux_C;
    j["strain2_only"] = eq.strain2_only;
  }
  return j;
}

inline json to_json(const ReproductionNumbers& r) {
  return json{{"r01", r.r01},
              {"r02", r.r02},
              {"from_closed_form",
               json::array({r.from_closed_form.first, r.from_closed_form.second})},
              {"from_spectral",
               json::array({r.from_spectral.first, r.from_spectral.second})},
              {"ngm_F", to_json(r.matrices.F)},
              {"ngm_V", to_json(r.matrices.V)},
              {"ngm_K", to_json(r.matrices.K)}};
}

inline json to_json(const StabilityReport& rep) {
  json eigs = json::array();
  for (const auto& e : rep.eigenvalues) {
    eigs.push_back(json{{"re", e.real()}, {"im", e.imag()}});
  }
  return json{
      {"point", to_json(rep.point)},
      {"eigenvalues", eigs},
      {"char_poly_coeffs", rep.char_poly_coeffs},
      {"routh_hurwitz",
       json{{"coefficients_positive", rep.routh.coefficients_positive},
            {"second_condition", rep.routh.second_condition},
            {"third_condition", rep.routh.third_condition},
            {"satisfied", rep.routh.satisfied}}},
      {"classification", classification_name(rep.classification)}};
}

inline json to_json(const BifurcationReport& rep) {
  return json{{"strain", static_cast<int>(rep.strain)},
              {"beta_star", rep.beta_star},
              {"right_eigenvector", rep.right_eigenvector},
              {"left_eigenvector", rep.left_eigenvector},
              {"a", rep.a},
              {"b", rep.b},
              {"delta_star", rep.delta_star},
              {"regime", rep.regime == Regime::Backward ? "backward" : "forward"},
              {"zero_eigenvalue_residual", rep.zero_eigenvalue_residual},
              {"vw_inner_product", rep.vw}};
}

inline json to_json(const SensitivityReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back(json{{"parameter", e.parameter},
                           {"value", e.value_used},
                           {"index_r01", e.index_r01},
                           {"index_r02", e.index_r02},
                           {"sign_r01", sign_class_name(e.sign_r01)},
                           {"sign_r02", sign_class_name(e.sign_r02)}});
  }
  return json{{"entries", entries}};
}

inline json to_json(const FitResult& r) {
  return json{{"parameters", to_json(r.parameters)},
              {"objective", r.objective},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"days", r.days},
              {"observed", r.observed},
              {"predicted", r.predicted},
              {"residuals", r.residuals}};
}

}  // namespace svir
