#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "svir/equilibria.hpp"
#include "svir/model.hpp"
#include "svir/serialize.hpp"
#include "test_support.hpp"

using namespace svir;
using testsup::rel_diff;

TEST_CASE("rhs vanishes at the disease-free equilibrium") {
  const Parameters p = testsup::reference_parameters();
  const State e0 = disease_free(p).state;
  const StateDerivative f = rhs(p, e0);
  for (std::size_t i = 0; i < kDim; ++i) {
    REQUIRE(std::abs(f[i]) <= 1e-9 * p.birth_rate);
  }
}

TEST_CASE("rhs at the empty state is pure birth inflow") {
  const Parameters p = testsup::reference_parameters();
  const StateDerivative f = rhs(p, State{0, 0, 0, 0, 0});
  REQUIRE(f[kS] == p.birth_rate);
  for (std::size_t i = 1; i < kDim; ++i) REQUIRE(f[i] == 0.0);
}

TEST_CASE("rhs at the reference initial conditions matches a scalar-script evaluation") {
  // expected values computed independently, term by term, at full precision
  const Parameters p = testsup::reference_parameters();
  const StateDerivative f = rhs(p, kReferenceInitialState);
  const StateDerivative expected = {-46121.344026333492, 54812.176978635922,
                                    -16629.018042747142, 2860.6453872446855,
                                    3566.0692136500002};
  for (std::size_t i = 0; i < kDim; ++i) {
    INFO("component " << compartment_name(i));
    REQUIRE(rel_diff(f[i], expected[i]) < 1e-10);
  }
}

TEST_CASE("rhs rejects non-finite states") {
  const Parameters p = testsup::reference_parameters();
  State bad = kReferenceInitialState;
  bad[kV] = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(rhs(p, bad), std::domain_error);
  bad[kV] = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(rhs(p, bad), std::domain_error);
}

TEST_CASE("conservation residual is rounding-level at reference points") {
  const Parameters p = testsup::reference_parameters();
  REQUIRE(std::abs(conservation_residual(p, disease_free(p).state)) <=
          1e-10 * p.birth_rate);
  REQUIRE(std::abs(conservation_residual(p, kReferenceInitialState)) <=
          1e-10 * flow_scale(p, kReferenceInitialState));
}

TEST_CASE("conservation residual property over random positive inputs") {
  testsup::ParameterSampler sampler(2024);
  for (int k = 0; k < 1000; ++k) {
    const Parameters p = sampler.draw();
    State x{};
    for (std::size_t i = 0; i < kDim; ++i) {
      x[i] = sampler.log_uniform(1e-3, 1e9);
    }
    const double res = conservation_residual(p, x);
    REQUIRE(std::abs(res) <= 1e-9 * flow_scale(p, x));
  }
}

TEST_CASE("region membership") {
  const Parameters p = testsup::reference_parameters();
  const double cap = p.birth_rate / p.natural_death;

  SECTION("boundary total is inside") {
    State x{cap / 5, cap / 5, cap / 5, cap / 5, cap / 5};
    REQUIRE(in_region(p, x));
  }
  SECTION("negative component is outside") {
    State x{-1.0, 0, 0, 0, 0};
    REQUIRE_FALSE(in_region(p, x));
  }
  SECTION("reference initial conditions sit just above the B/omega cap") {
    // N(0) = 84,680,273 vs B/omega = 84,667,609.6 (independent evaluation)
    REQUIRE(total_population(kReferenceInitialState) ==
            Catch::Approx(84680273.0));
    REQUIRE(cap == Catch::Approx(84667609.61810467).epsilon(1e-12));
    REQUIRE_FALSE(in_region(p, kReferenceInitialState));
  }
}

TEST_CASE("empty compartments have non-negative inflow (forward invariance)") {
  testsup::ParameterSampler sampler(99);
  for (int k = 0; k < 200; ++k) {
    const Parameters p = sampler.draw();
    State x = sampler.state_in_region(p);
    for (std::size_t dead = 0; dead < kDim; ++dead) {
      State y = x;
      y[dead] = 0.0;
      const StateDerivative f = rhs(p, y);
      INFO("compartment " << compartment_name(dead));
      REQUIRE(f[dead] >= 0.0);
    }
    // I1 has no inflow once empty
    State y = x;
    y[kI1] = 0.0;
    REQUIRE(rhs(p, y)[kI1] == 0.0);
  }
}

TEST_CASE("parameter invariants are enforced") {
  Parameters p;
  p.natural_death = 0.0;
  REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  p = Parameters{};
  p.vaccine_efficacy = 1.5;
  REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  p = Parameters{};
  p.beta1 = -1e-9;
  REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  p = Parameters{};
  p.vaccine_efficacy = 1.0;  // perfect vaccine is allowed
  REQUIRE_NOTHROW(p.validate());
}

TEST_CASE("parameters JSON round trip and unknown-key rejection") {
  Parameters p = testsup::reference_parameters();
  p.beta2 = 3.25e-9;
  const json j = to_json(p);
  const Parameters q = parameters_from_json(j);
  REQUIRE(q.beta2 == p.beta2);
  REQUIRE(q.recovery1 == p.recovery1);

  json bad = j;
  bad["beta3"] = 1.0;
  REQUIRE_THROWS_AS(parameters_from_json(bad), std::invalid_argument);
}

TEST_CASE("state JSON requires all five named components") {
  const json j{{"S", 1.0}, {"V", 2.0}, {"I1", 3.0}, {"I2", 4.0}, {"R", 5.0}};
  const State x = state_from_json(j);
  REQUIRE(x == State{1, 2, 3, 4, 5});
  json missing = j;
  missing.erase("I2");
  REQUIRE_THROWS_AS(state_from_json(missing), std::invalid_argument);
  json extra = j;
  extra["Q"] = 0.0;
  REQUIRE_THROWS_AS(state_from_json(extra), std::invalid_argument);
}
