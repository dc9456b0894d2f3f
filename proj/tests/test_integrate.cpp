#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "svir/equilibria.hpp"
#include "svir/integrate.hpp"
#include "test_support.hpp"

using namespace svir;
using testsup::rel_diff;

namespace {

Parameters pure_decay_parameters(double /*s0*/) {
  Parameters p;
  p.birth_rate = 0.0;
  p.beta1 = p.beta2 = 0.0;
  p.vaccination_rate = p.vaccine_waning = p.natural_waning = 0.0;
  p.mutation_rate = 0.0;
  return p;
}

}  // namespace

TEST_CASE("pure exponential decay matches the closed form") {
  const double s0 = 12345.0;
  const Parameters p = pure_decay_parameters(s0);
  IntegratorConfig cfg;
  cfg.t_end = 5000.0;
  cfg.output_step = 500.0;
  for (Method method : {Method::RK4, Method::DormandPrince45}) {
    cfg.method = method;
    cfg.h = 0.5;
    const Trajectory traj = integrate(p, State{s0, 0, 0, 0, 0}, cfg);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const double expected = s0 * std::exp(-p.natural_death * traj.times[k]);
      REQUIRE(rel_diff(traj.states[k][kS], expected) < 1e-7);
      for (std::size_t i = 1; i < kDim; ++i) REQUIRE(traj.states[k][i] == 0.0);
    }
  }
}

TEST_CASE("equilibrium initial condition stays put") {
  const Parameters p = testsup::reference_parameters();
  const State e0 = disease_free(p).state;
  IntegratorConfig cfg;
  cfg.t_end = 200.0;
  const Trajectory traj = integrate(p, e0, cfg);
  for (const State& x : traj.states) {
    for (std::size_t i = 0; i < 2; ++i) {
      REQUIRE(rel_diff(x[i], e0[i]) < 1e-8);
    }
    REQUIRE(x[kI1] == 0.0);
    REQUIRE(x[kI2] == 0.0);
  }
}

TEST_CASE("RK4 and DP45 agree on the reference scenario") {
  const Parameters p = testsup::reference_parameters();
  IntegratorConfig rk;
  rk.method = Method::RK4;
  rk.h = 0.01;
  rk.t_end = 200.0;
  rk.output_step = 50.0;
  IntegratorConfig dp;
  dp.method = Method::DormandPrince45;
  dp.rel_tol = 1e-10;
  dp.abs_tol = 1e-10 * total_population(kReferenceInitialState);
  dp.t_end = 200.0;
  dp.output_step = 50.0;
  const Trajectory a = integrate(p, kReferenceInitialState, rk);
  const Trajectory b = integrate(p, kReferenceInitialState, dp);
  REQUIRE(a.times == b.times);
  const State& xa = a.states.back();
  const State& xb = b.states.back();
  for (std::size_t i = 0; i < kDim; ++i) {
    INFO("component " << compartment_name(i));
    REQUIRE(rel_diff(xa[i], xb[i]) < 1e-6);
  }
  // the mutant wave rises then falls within the horizon
  double peak = 0.0;
  std::size_t peak_at = 0;
  for (std::size_t k = 0; k < b.states.size(); ++k) {
    if (b.states[k][kI2] > peak) {
      peak = b.states[k][kI2];
      peak_at = k;
    }
  }
  REQUIRE(peak_at > 0);
  REQUIRE(peak_at + 1 < b.states.size());
  REQUIRE(peak > b.states.front()[kI2]);
  REQUIRE(peak > b.states.back()[kI2]);
}

TEST_CASE("observed RK4 order and error ratio") {
  const Parameters p = testsup::reference_parameters();
  const double order = observed_order(p, kReferenceInitialState, 0.5, 50.0);
  REQUIRE(order >= 3.8);
  REQUIRE(order <= 4.2);

  // halving the step cuts the global error by about 16x
  IntegratorConfig ref_cfg;
  ref_cfg.rel_tol = 1e-12;
  ref_cfg.abs_tol = 1e-10 * total_population(kReferenceInitialState);
  ref_cfg.t_end = 50.0;
  ref_cfg.output_step = 50.0;
  const State ref = integrate(p, kReferenceInitialState, ref_cfg).states.back();
  auto rk4_err = [&](double h) {
    IntegratorConfig c;
    c.method = Method::RK4;
    c.h = h;
    c.t_end = 50.0;
    c.output_step = 50.0;
    const State s = integrate(p, kReferenceInitialState, c).states.back();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
      num += (s[i] - ref[i]) * (s[i] - ref[i]);
      den += ref[i] * ref[i];
    }
    return std::sqrt(num / den);
  };
  const double ratio = rk4_err(0.5) / rk4_err(0.25);
  REQUIRE(ratio > 16.0 * 0.8);
  REQUIRE(ratio < 16.0 * 1.2);
}

TEST_CASE("linear-decay system also shows fourth order") {
  const Parameters p = pure_decay_parameters(1.0);
  // decay rate omega is tiny, so stretch the horizon to see the error
  const double order = observed_order(p, State{1e6, 0, 0, 0, 0}, 2000.0, 40000.0);
  REQUIRE(order >= 3.8);
  REQUIRE(order <= 4.2);
}

TEST_CASE("population bound holds along trajectories started inside D") {
  const Parameters p = testsup::reference_parameters();
  testsup::ParameterSampler sampler(31);
  for (int trial = 0; trial < 20; ++trial) {
    const State x0 = sampler.state_in_region(p);
    REQUIRE(in_region(p, x0));
    IntegratorConfig cfg;
    cfg.t_end = 400.0;
    const Trajectory traj = integrate(p, x0, cfg);
    const double bound =
        std::max(total_population(x0), p.birth_rate / p.natural_death);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      REQUIRE(total_population(traj.states[k]) <= bound * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("step-size underflow raises an integration error with the time") {
  const Parameters p = testsup::reference_parameters();
  IntegratorConfig cfg;
  cfg.method = Method::DormandPrince45;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-300;  // unreachable absolute tolerance
  cfg.h_min = 1.0;       // but steps may not shrink below a day
  cfg.h_max = 1.0;
  cfg.h = 1.0;
  cfg.t_end = 50.0;
  try {
    integrate(p, kReferenceInitialState, cfg);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    REQUIRE(e.time >= 0.0);
    REQUIRE(e.time <= 50.0);
  }
}

TEST_CASE("negativity policy clamps rounding dips and rejects real undershoot") {
  State x{1e6, 1e6, -1e-5, 0.0, 1e6};  // dip well under 1e-9 * N
  apply_negativity_policy(x, 3.0);
  REQUIRE(x[kI1] == 0.0);
  REQUIRE(x[kS] == 1e6);

  State bad{1e6, 1e6, -10.0, 0.0, 1e6};  // a real undershoot
  try {
    apply_negativity_policy(bad, 7.5);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    REQUIRE(e.time == 7.5);
  }
}

TEST_CASE("negative initial conditions are rejected") {
  const Parameters p = testsup::reference_parameters();
  State x0 = kReferenceInitialState;
  x0[kR] = -5.0;
  REQUIRE_THROWS_AS(integrate(p, x0, IntegratorConfig{}), std::invalid_argument);
}

TEST_CASE("trajectory CSV export shape") {
  const Parameters p = testsup::reference_parameters();
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  cfg.output_step = 1.0;
  const Trajectory traj = integrate(p, kReferenceInitialState, cfg);
  REQUIRE(traj.times.size() == 3);
  REQUIRE(traj.times.front() == 0.0);
  REQUIRE(traj.times.back() == 2.0);
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  const std::string text = os.str();
  REQUIRE(text.rfind("t,S,V,I1,I2,R\n", 0) == 0);
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 4);
  // full precision round trip of the first state value
  REQUIRE(text.find("26195740") != std::string::npos);
}
