// Explicit integrators for the model: classical RK4 with a fixed step and an
// embedded Dormand-Prince 5(4) pair with step-size control. Output states are
// sampled on a uniform grid by cubic Hermite interpolation (4th order)
// between accepted steps.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "svir/model.hpp"

namespace svir {

enum class Method { RK4, DormandPrince45 };

struct IntegratorConfig {
  Method method = Method::DormandPrince45;
  double h = 0.01;          // RK4 step (days); also the DP45 initial step
  double abs_tol = 0.0;     // DP45; 0 selects the default 1e-8 * N(0)
  double rel_tol = 1e-8;    // DP45
  double h_min = 1e-10;
  double h_max = 25.0;
  double t_end = 200.0;
  double output_step = 0.5;  // sample spacing of the returned trajectory

  void validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("integrator: h must be > 0");
    if (!(h_min > 0.0) || !(h_min <= h_max))
      throw std::invalid_argument("integrator: need 0 < h_min <= h_max");
    if (!(rel_tol > 0.0))
      throw std::invalid_argument("integrator: rel_tol must be > 0");
    if (!(abs_tol >= 0.0))
      throw std::invalid_argument("integrator: abs_tol must be >= 0");
    if (!(t_end > 0.0))
      throw std::invalid_argument("integrator: t_end must be > 0");
    if (!(output_step > 0.0))
      throw std::invalid_argument("integrator: output_step must be > 0");
  }
};

struct IntegrationError : std::runtime_error {
  double time;
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what + " at t = " + std::to_string(t)), time(t) {}
};

// Undershoots below -1e-9 * N are integration failures; smaller ones are
// rounding and get clamped to zero.
inline void apply_negativity_policy(State& x, double t) {
  double n = 0.0;
  for (double c : x) n += std::max(c, 0.0);
  const double tol = 1e-9 * std::max(n, 1.0);
  for (std::size_t i = 0; i < kDim; ++i) {
    if (x[i] < 0.0) {
      if (x[i] < -tol) {
        throw IntegrationError(std::string("compartment ") +
                                   compartment_name(i) +
                                   " went negative (" +
                                   std::to_string(x[i]) + ")",
                               t);
      }
      x[i] = 0.0;
    }
  }
}

namespace detail {

inline State hermite(double t0, const State& y0, const StateDerivative& f0,
                     double t1, const State& y1, const StateDerivative& f1,
                     double t) {
  const double h = t1 - t0;
  const double th = (t - t0) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1;
  const double h10 = th3 - 2 * th2 + th;
  const double h01 = -2 * th3 + 3 * th2;
  const double h11 = th3 - th2;
  State y;
  for (std::size_t i = 0; i < kDim; ++i) {
    y[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  }
  return y;
}

class OutputCollector {
 public:
  OutputCollector(Trajectory& out, double dt, double t_end)
      : out_(out), dt_(dt), t_end_(t_end) {}

  void start(const State& x0) {
    out_.times.push_back(0.0);
    out_.states.push_back(x0);
    next_ = 1;
  }

  // Emits every grid point inside (t0, t1] using Hermite interpolation.
  void advance(double t0, const State& y0, const StateDerivative& f0,
               double t1, const State& y1, const StateDerivative& f1) {
    while (true) {
      double t = next_ * dt_;
      const bool is_last = t >= t_end_ - 1e-12 * std::max(t_end_, 1.0);
      if (is_last) t = t_end_;
      if (t > t1 + 1e-12 * std::max(t1, 1.0)) break;
      State y = (t >= t1) ? y1 : hermite(t0, y0, f0, t1, y1, f1, t);
      apply_negativity_policy(y, t);
      out_.times.push_back(t);
      out_.states.push_back(y);
      ++next_;
      if (is_last) {
        done_ = true;
        break;
      }
    }
  }

  bool done() const { return done_; }

 private:
  Trajectory& out_;
  double dt_;
  double t_end_;
  std::size_t next_ = 1;
  bool done_ = false;
};

inline void rk4_step(const Parameters& p, const State& y,
                     const StateDerivative& k1, double h, State& out) {
  State tmp;
  for (std::size_t i = 0; i < kDim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  const StateDerivative k2 = rhs(p, tmp);
  for (std::size_t i = 0; i < kDim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  const StateDerivative k3 = rhs(p, tmp);
  for (std::size_t i = 0; i < kDim; ++i) tmp[i] = y[i] + h * k3[i];
  const StateDerivative k4 = rhs(p, tmp);
  for (std::size_t i = 0; i < kDim; ++i) {
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
}

}  // namespace detail

/// Integrates the model from t = 0 to cfg.t_end.
inline Trajectory integrate(const Parameters& p, const State& x0,
                            const IntegratorConfig& cfg) {
  p.validate();
  cfg.validate();
  require_finite(x0);
  for (std::size_t i = 0; i < kDim; ++i) {
    if (x0[i] < 0.0) {
      throw std::invalid_argument(std::string("initial state component ") +
                                  compartment_name(i) + " is negative");
    }
  }

  Trajectory traj;
  traj.parameters = p;
  detail::OutputCollector collector(traj, cfg.output_step, cfg.t_end);
  collector.start(x0);

  const double n0 = std::max(total_population(x0), 1.0);

  if (cfg.method == Method::RK4) {
    double t = 0.0;
    State y = x0;
    StateDerivative f0 = rhs(p, y);
    while (!collector.done() && t < cfg.t_end) {
      const double h = std::min(cfg.h, cfg.t_end - t);
      State y1;
      detail::rk4_step(p, y, f0, h, y1);
      const double t1 = std::min(t + h, cfg.t_end);
      apply_negativity_policy(y1, t1);
      const StateDerivative f1 = rhs(p, y1);
      collector.advance(t, y, f0, t1, y1, f1);
      t = t1;
      y = y1;
      f0 = f1;
    }
    return traj;
  }

  // Dormand-Prince 5(4), FSAL.
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double atol = (cfg.abs_tol > 0.0) ? cfg.abs_tol : 1e-8 * n0;

  double t = 0.0;
  State y = x0;
  StateDerivative k1 = rhs(p, y);
  double h = std::clamp(cfg.h, cfg.h_min, cfg.h_max);

  while (!collector.done() && t < cfg.t_end) {
    h = std::min(h, cfg.t_end - t);
    State tmp;
    for (std::size_t i = 0; i < kDim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const StateDerivative k2 = rhs(p, tmp);
    for (std::size_t i = 0; i < kDim; ++i)
      tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const StateDerivative k3 = rhs(p, tmp);
    for (std::size_t i = 0; i < kDim; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const StateDerivative k4 = rhs(p, tmp);
    for (std::size_t i = 0; i < kDim; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const StateDerivative k5 = rhs(p, tmp);
    for (std::size_t i = 0; i < kDim; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    const StateDerivative k6 = rhs(p, tmp);
    State y1;
    for (std::size_t i = 0; i < kDim; ++i)
      y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
    const StateDerivative k7 = rhs(p, y1);

    double err = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
      const double sc = atol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / kDim);

    if (err <= 1.0) {
      const double t1 = t + h;
      State y1c = y1;
      apply_negativity_policy(y1c, t1);
      const StateDerivative f1 = (y1c == y1) ? k7 : rhs(p, y1c);
      collector.advance(t, y, k1, t1, y1c, f1);
      t = t1;
      y = y1c;
      k1 = f1;
    } else if (h <= cfg.h_min * (1.0 + 1e-12)) {
      throw IntegrationError("step size underflow (h_min reached without "
                             "meeting the error tolerance)",
                             t);
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-300), -0.2), 0.2, 5.0);
    h = std::clamp(h * factor, cfg.h_min, cfg.h_max);
  }
  return traj;
}

/// Empirical RK4 convergence order on this model: integrates with steps h and
/// h/2 against a tight DP45 reference and returns log2(e_h / e_{h/2}).
inline double observed_order(const Parameters& p, const State& x0,
                             double h = 0.5, double t_end = 50.0) {
  IntegratorConfig ref_cfg;
  ref_cfg.method = Method::DormandPrince45;
  ref_cfg.rel_tol = 1e-12;
  ref_cfg.abs_tol = 1e-10 * std::max(total_population(x0), 1.0);
  ref_cfg.t_end = t_end;
  ref_cfg.output_step = t_end;
  const State ref = integrate(p, x0, ref_cfg).states.back();

  auto rk4_final = [&](double step) {
    IntegratorConfig c;
    c.method = Method::RK4;
    c.h = step;
    c.t_end = t_end;
    c.output_step = t_end;
    return integrate(p, x0, c).states.back();
  };
  auto err = [&](const State& s) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
      num += (s[i] - ref[i]) * (s[i] - ref[i]);
      den += ref[i] * ref[i];
    }
    return std::sqrt(num / den);
  };
  const double e1 = err(rk4_final(h));
  const double e2 = err(rk4_final(h / 2.0));
  return std::log2(e1 / e2);
}

/// CSV export: header `t,S,V,I1,I2,R`, full double precision.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,S,V,I1,I2,R\n";
  char buf[64];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[k]);
    os << buf;
    for (std::size_t i = 0; i < kDim; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.states[k][i]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace svir
