// Least-squares calibration of transmission/mutation rates against an
// observed case series: objective evaluation over simulated trajectories,
// Nelder-Mead minimization in log-parameter space, and a synthetic-series
// generator for validation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svir/integrate.hpp"
#include "svir/model.hpp"
#include "svir/serialize.hpp"

namespace svir {

enum class ObservableKind { ActiveInfectedTotal, DailyNewInfections };

/// Model counterpart of an observation: the active infected total I1 + I2,
/// or the instantaneous incidence rate
///   beta1 S I1 + beta2 S I2 + (1-sigma)(beta1 V I1 + beta2 V I2).
inline double model_observable(ObservableKind kind, const Parameters& p,
                               const State& x) {
  if (kind == ObservableKind::ActiveInfectedTotal) {
    return x[kI1] + x[kI2];
  }
  const double leak = 1.0 - p.vaccine_efficacy;
  return p.beta1 * x[kS] * x[kI1] + p.beta2 * x[kS] * x[kI2] +
         leak * (p.beta1 * x[kV] * x[kI1] + p.beta2 * x[kV] * x[kI2]);
}

struct CaseSeries {
  std::vector<int> days;          // offsets from t = 0, strictly increasing
  std::vector<double> observed;   // persons, >= 0
  ObservableKind kind = ObservableKind::ActiveInfectedTotal;

  void validate() const {
    if (days.empty() || days.size() != observed.size()) {
      throw std::invalid_argument("case series: need matching nonempty days/observed");
    }
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (days[i] < 0) throw std::invalid_argument("case series: negative day");
      if (i > 0 && days[i] <= days[i - 1]) {
        throw std::invalid_argument("case series: days must be strictly increasing");
      }
      if (!std::isfinite(observed[i]) || observed[i] < 0.0) {
        throw std::invalid_argument("case series: observations must be finite and >= 0");
      }
    }
  }
};

/// Reads `day,observed` CSV. Errors name the offending 1-based line.
inline CaseSeries case_series_from_csv(std::istream& in) {
  CaseSeries s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "day,observed") {
        throw std::invalid_argument("line 1: expected header 'day,observed'");
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 'day,observed'");
    }
    try {
      std::size_t used = 0;
      const std::string day_text = line.substr(0, comma);
      const int day = std::stoi(day_text, &used);
      if (used != day_text.size()) throw std::invalid_argument("trailing text");
      const std::string obs_text = line.substr(comma + 1);
      const double obs = std::stod(obs_text, &used);
      if (used != obs_text.size()) throw std::invalid_argument("trailing text");
      s.days.push_back(day);
      s.observed.push_back(obs);
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": malformed row '" + line + "'");
    }
    if (s.days.size() > 1 && s.days.back() <= s.days[s.days.size() - 2]) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": days must be strictly increasing");
    }
    if (s.observed.back() < 0.0 || !std::isfinite(s.observed.back())) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": observation must be finite and >= 0");
    }
  }
  s.validate();
  return s;
}

/// Builds a valid series from unordered rows (sorts by day first).
inline CaseSeries normalized_series(std::vector<std::pair<int, double>> rows,
                                    ObservableKind kind) {
  std::sort(rows.begin(), rows.end());
  CaseSeries s;
  s.kind = kind;
  for (const auto& [d, o] : rows) {
    s.days.push_back(d);
    s.observed.push_back(o);
  }
  s.validate();
  return s;
}

namespace detail {

/// Model observable sampled at every series day, via one DP45 integration
/// with daily output.
inline std::vector<double> predict_series(const Parameters& p,
                                          const CaseSeries& series,
                                          const State& x0) {
  std::vector<double> out(series.days.size());
  const int last = series.days.back();
  if (last == 0) {
    out[0] = model_observable(series.kind, p, x0);
    return out;
  }
  IntegratorConfig cfg;
  cfg.method = Method::DormandPrince45;
  cfg.rel_tol = 1e-9;
  cfg.t_end = static_cast<double>(last);
  cfg.output_step = 1.0;
  const Trajectory traj = integrate(p, x0, cfg);
  for (std::size_t i = 0; i < series.days.size(); ++i) {
    out[i] = model_observable(series.kind, p,
                              traj.states[static_cast<std::size_t>(series.days[i])]);
  }
  return out;
}

}  // namespace detail

/// Sum of squared residuals between the model observable and the series.
inline double objective(const Parameters& p, const CaseSeries& series,
                        const State& x0) {
  series.validate();
  const std::vector<double> pred = detail::predict_series(p, series, x0);
  double ss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - series.observed[i];
    ss += r * r;
  }
  return ss;
}

struct FitConfig {
  std::vector<std::string> free_parameters = {"beta1", "beta2", "m"};
  std::map<std::string, double> initial_guess = {
      {"beta1", 4e-9}, {"beta2", 8.5e-9}, {"m", 0.01}};
  double x_tol = 1e-9;   // simplex diameter in log-parameter space
  double f_tol = 1e-9;   // objective spread relative to max(1, |f_best|)
  int max_evals = 2000;

  void validate() const {
    if (!(x_tol > 0.0) || !(f_tol > 0.0)) {
      throw std::invalid_argument("fit: tolerances must be > 0");
    }
    if (max_evals < 1) throw std::invalid_argument("fit: max_evals must be >= 1");
    for (const auto& name : free_parameters) {
      const auto it = initial_guess.find(name);
      if (it == initial_guess.end()) {
        throw std::invalid_argument("fit: no initial guess for " + name);
      }
      if (!(it->second > 0.0)) {
        throw std::invalid_argument("fit: initial guess for " + name +
                                    " must be > 0 (positivity bound)");
      }
    }
  }
};

struct FitResult {
  Parameters parameters;        // fixed values with fitted ones substituted
  double objective = 0.0;       // final sum of squared residuals
  int evaluations = 0;
  bool converged = false;
  std::vector<int> days;
  std::vector<double> observed;
  std::vector<double> predicted;
  std::vector<double> residuals;  // predicted - observed, per day
};

namespace detail {

// "m" is accepted as shorthand for mutation_rate to mirror the fitted
// parameter naming used throughout the reports.
inline double* fit_parameter_field(Parameters& p, const std::string& name) {
  if (name == "m") return &p.mutation_rate;
  return parameter_field(p, name);
}

}  // namespace detail

/// Nelder-Mead in the log of the free parameters (positivity by
/// construction), standard coefficients: reflect 1, expand 2, contract 0.5,
/// shrink 0.5. Converged when the simplex diameter drops below x_tol and the
/// objective spread below f_tol * max(1, |f_best|); otherwise returns the
/// best point found when max_evals is exhausted.
inline FitResult fit(const CaseSeries& series, const FitConfig& cfg,
                     const Parameters& fixed, const State& x0) {
  series.validate();
  cfg.validate();
  fixed.validate();

  const std::size_t n = cfg.free_parameters.size();
  FitResult result;
  result.days = series.days;
  result.observed = series.observed;

  auto assemble = [&](const std::vector<double>& log_q) {
    Parameters p = fixed;
    for (std::size_t i = 0; i < n; ++i) {
      double* field = detail::fit_parameter_field(p, cfg.free_parameters[i]);
      if (field == nullptr) {
        throw std::invalid_argument("fit: unknown parameter " +
                                    cfg.free_parameters[i]);
      }
      *field = std::exp(log_q[i]);
    }
    return p;
  };

  int evals = 0;
  auto eval = [&](const std::vector<double>& log_q) {
    ++evals;
    return objective(assemble(log_q), series, x0);
  };

  std::vector<double> guess(n);
  for (std::size_t i = 0; i < n; ++i) {
    guess[i] = std::log(cfg.initial_guess.at(cfg.free_parameters[i]));
  }

  if (n == 0) {
    result.parameters = fixed;
    result.objective = eval(guess);
    result.evaluations = evals;
    result.converged = true;
  } else {
    std::vector<std::vector<double>> vertices(n + 1, guess);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) vertices[i + 1][i] += 0.25;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(vertices[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_order = [&] {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    bool converged = false;
    while (evals < cfg.max_evals) {
      sort_order();
      const std::size_t best = order[0], worst = order[n],
                        second_worst = order[n - 1];
      double diameter = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t jj = 0; jj < n; ++jj) {
          diameter = std::max(diameter, std::abs(vertices[order[i]][jj] -
                                                 vertices[best][jj]));
        }
      }
      const double spread = fv[worst] - fv[best];
      if (diameter < cfg.x_tol &&
          spread < cfg.f_tol * std::max(1.0, std::abs(fv[best]))) {
        converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t jj = 0; jj < n; ++jj) centroid[jj] += vertices[i][jj];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      auto blend = [&](double t) {
        std::vector<double> x(n);
        for (std::size_t jj = 0; jj < n; ++jj) {
          x[jj] = centroid[jj] + t * (centroid[jj] - vertices[worst][jj]);
        }
        return x;
      };

      const std::vector<double> reflected = blend(1.0);
      const double f_r = eval(reflected);
      if (f_r < fv[best]) {
        const std::vector<double> expanded = blend(2.0);
        const double f_e = eval(expanded);
        if (f_e < f_r) {
          vertices[worst] = expanded;
          fv[worst] = f_e;
        } else {
          vertices[worst] = reflected;
          fv[worst] = f_r;
        }
      } else if (f_r < fv[second_worst]) {
        vertices[worst] = reflected;
        fv[worst] = f_r;
      } else {
        const bool outside = f_r < fv[worst];
        const std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
        const double f_c = eval(contracted);
        if (f_c < std::min(f_r, fv[worst])) {
          vertices[worst] = contracted;
          fv[worst] = f_c;
        } else {
          // shrink toward the best vertex
          for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t jj = 0; jj < n; ++jj) {
              vertices[i][jj] =
                  vertices[best][jj] + 0.5 * (vertices[i][jj] - vertices[best][jj]);
            }
            fv[i] = eval(vertices[i]);
          }
        }
      }
    }
    sort_order();
    result.parameters = assemble(vertices[order[0]]);
    result.objective = fv[order[0]];
    result.evaluations = evals;
    result.converged = converged;
  }

  result.predicted = detail::predict_series(result.parameters, series, x0);
  result.residuals.resize(result.predicted.size());
  for (std::size_t i = 0; i < result.predicted.size(); ++i) {
    result.residuals[i] = result.predicted[i] - series.observed[i];
  }
  return result;
}

namespace detail {

/// Deterministic standard normals: Box-Muller over mt19937_64 draws.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform() {
    return (static_cast<double>(gen_() >> 11)) * 0x1.0p-53;
  }
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

/// Daily ActiveInfectedTotal samples from a high-accuracy integration,
/// optionally perturbed by multiplicative lognormal noise exp(noise_rel * z).
/// Deterministic for a given seed; noise_rel = 0 ignores the seed entirely.
inline CaseSeries generate_synthetic(const Parameters& p, const State& x0,
                                     int days, double noise_rel,
                                     std::uint64_t seed) {
  if (days < 1) throw std::invalid_argument("generate_synthetic: days must be >= 1");
  if (!(noise_rel >= 0.0)) {
    throw std::invalid_argument("generate_synthetic: noise_rel must be >= 0");
  }
  CaseSeries s;
  s.kind = ObservableKind::ActiveInfectedTotal;
  s.days.resize(static_cast<std::size_t>(days));
  std::iota(s.days.begin(), s.days.end(), 0);
  s.observed.resize(s.days.size());
  if (days == 1) {
    s.observed[0] = model_observable(s.kind, p, x0);
  } else {
    IntegratorConfig cfg;
    cfg.method = Method::DormandPrince45;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-10 * std::max(total_population(x0), 1.0);
    cfg.t_end = static_cast<double>(days - 1);
    cfg.output_step = 1.0;
    const Trajectory traj = integrate(p, x0, cfg);
    for (std::size_t i = 0; i < s.days.size(); ++i) {
      s.observed[i] = model_observable(s.kind, p, traj.states[i]);
    }
  }
  if (noise_rel > 0.0) {
    detail::NormalSampler normal(seed);
    for (double& o : s.observed) o *= std::exp(noise_rel * normal.next());
  }
  return s;
}

/// CSV export matching case_series_from_csv.
inline void write_case_series_csv(const CaseSeries& s, std::ostream& os) {
  os << "day,observed\n";
  char buf[64];
  for (std::size_t i = 0; i < s.days.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.observed[i]);
    os << s.days[i] << ',' << buf << '\n';
  }
}

}  // namespace svir
