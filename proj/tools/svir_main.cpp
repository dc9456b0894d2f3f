// Command-line front end: simulation, analysis bundle, calibration and the
// individual reports, driven by a JSON config plus flag overrides.
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "svir/report_json.hpp"
#include "svir/svg.hpp"

namespace fs = std::filesystem;
using svir::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysisFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts both the spelled-out field names and the conventional short
// symbols (sigma, alpha, ...) on the command line and in config files.
double* resolve_parameter(svir::Parameters& p, const std::string& name) {
  if (double* f = svir::parameter_field(p, name)) return f;
  if (name == "B") return &p.birth_rate;
  if (name == "omega") return &p.natural_death;
  if (name == "alpha") return &p.vaccination_rate;
  if (name == "mu") return &p.vaccine_waning;
  if (name == "delta") return &p.natural_waning;
  if (name == "sigma") return &p.vaccine_efficacy;
  if (name == "omega1") return &p.excess_death1;
  if (name == "omega2") return &p.excess_death2;
  if (name == "m") return &p.mutation_rate;
  if (name == "r1") return &p.recovery1;
  if (name == "r2") return &p.recovery2;
  return nullptr;
}

struct RunConfig {
  svir::Parameters parameters;
  svir::State initial_conditions = svir::kReferenceInitialState;
  svir::IntegratorConfig integrator;
  std::optional<std::pair<std::string, std::vector<double>>> sweep;
  svir::FitConfig fit;
  std::string output_dir = "out";
  bool svg = false;
  std::uint64_t seed = 0;
  std::string column = "I2";
};

std::size_t column_index(const std::string& name) {
  for (std::size_t i = 0; i < svir::kDim; ++i) {
    if (name == svir::compartment_name(i)) return i;
  }
  throw UsageError("unknown column '" + name + "' (expected S, V, I1, I2 or R)");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "parameters") {
      for (const auto& [pk, pv] : value.items()) {
        double* f = resolve_parameter(cfg.parameters, pk);
        if (!f) throw UsageError("config: unknown parameter '" + pk + "'");
        *f = pv.get<double>();
      }
    } else if (key == "initial_conditions") {
      cfg.initial_conditions = svir::state_from_json(value);
    } else if (key == "integrator") {
      for (const auto& [ik, iv] : value.items()) {
        if (ik == "method") {
          const std::string m = iv.get<std::string>();
          if (m == "rk4") {
            cfg.integrator.method = svir::Method::RK4;
          } else if (m == "dp45") {
            cfg.integrator.method = svir::Method::DormandPrince45;
          } else {
            throw UsageError("config: unknown method '" + m + "'");
          }
        } else if (ik == "h") {
          cfg.integrator.h = iv.get<double>();
        } else if (ik == "abs_tol") {
          cfg.integrator.abs_tol = iv.get<double>();
        } else if (ik == "rel_tol") {
          cfg.integrator.rel_tol = iv.get<double>();
        } else if (ik == "h_min") {
          cfg.integrator.h_min = iv.get<double>();
        } else if (ik == "h_max") {
          cfg.integrator.h_max = iv.get<double>();
        } else if (ik == "t_end") {
          cfg.integrator.t_end = iv.get<double>();
        } else if (ik == "output_step") {
          cfg.integrator.output_step = iv.get<double>();
        } else {
          throw UsageError("config: unknown integrator key '" + ik + "'");
        }
      }
    } else if (key == "sweep") {
      cfg.sweep = {value.at("parameter").get<std::string>(),
                   value.at("values").get<std::vector<double>>()};
    } else if (key == "fit") {
      for (const auto& [fk, fv] : value.items()) {
        if (fk == "free_parameters") {
          cfg.fit.free_parameters = fv.get<std::vector<std::string>>();
        } else if (fk == "initial_guess") {
          for (const auto& [gk, gv] : fv.items()) {
            cfg.fit.initial_guess[gk] = gv.get<double>();
          }
        } else if (fk == "x_tol") {
          cfg.fit.x_tol = fv.get<double>();
        } else if (fk == "f_tol") {
          cfg.fit.f_tol = fv.get<double>();
        } else if (fk == "max_evals") {
          cfg.fit.max_evals = fv.get<int>();
        } else {
          throw UsageError("config: unknown fit key '" + fk + "'");
        }
      }
    } else if (key == "output_dir") {
      cfg.output_dir = value.get<std::string>();
    } else if (key == "svg") {
      cfg.svg = value.get<bool>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "column") {
      cfg.column = value.get<std::string>();
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
}

void apply_param_flags(RunConfig& cfg, const std::vector<std::string>& params) {
  for (const std::string& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--param expects name=value, got '" + kv + "'");
    }
    const std::string name = kv.substr(0, eq);
    double* f = resolve_parameter(cfg.parameters, name);
    if (!f) throw UsageError("--param: unknown parameter '" + name + "'");
    try {
      *f = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--param: bad value in '" + kv + "'");
    }
  }
}

void apply_sweep_flag(RunConfig& cfg, const std::string& sweep) {
  if (sweep.empty()) return;
  const auto eq = sweep.find('=');
  if (eq == std::string::npos) {
    throw UsageError("--sweep expects name=v1,v2,..., got '" + sweep + "'");
  }
  std::pair<std::string, std::vector<double>> sw;
  sw.first = sweep.substr(0, eq);
  {
    svir::Parameters probe;
    if (!resolve_parameter(probe, sw.first)) {
      throw UsageError("--sweep: unknown parameter '" + sw.first + "'");
    }
  }
  std::stringstream ss(sweep.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      sw.second.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("--sweep: bad value '" + item + "'");
    }
  }
  if (sw.second.empty()) throw UsageError("--sweep: no values given");
  cfg.sweep = std::move(sw);
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << contents;
  if (!out) throw UsageError("write failed for " + path.string());
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

int cmd_simulate(const RunConfig& cfg) {
  cfg.parameters.validate();
  cfg.integrator.validate();
  const std::size_t col = column_index(cfg.column);
  fs::create_directories(cfg.output_dir);

  std::vector<std::pair<std::string, svir::Parameters>> members;
  if (cfg.sweep) {
    for (double v : cfg.sweep->second) {
      svir::Parameters p = cfg.parameters;
      *resolve_parameter(p, cfg.sweep->first) = v;
      members.emplace_back(cfg.sweep->first + "=" + format_value(v), p);
    }
  } else {
    members.emplace_back("trajectory", cfg.parameters);
  }

  // independent pure simulations run concurrently; one collector writes
  std::vector<std::future<svir::Trajectory>> futures;
  futures.reserve(members.size());
  for (const auto& [name, p] : members) {
    futures.push_back(std::async(std::launch::async, [&, p]() {
      return svir::integrate(p, cfg.initial_conditions, cfg.integrator);
    }));
  }

  json peaks;
  std::vector<svir::SvgSeries> chart;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const svir::Trajectory traj = futures[i].get();
    const std::string& name = members[i].first;
    std::ostringstream csv;
    svir::write_trajectory_csv(traj, csv);
    const std::string file_name =
        (members.size() == 1 && !cfg.sweep) ? "trajectory.csv"
                                            : "trajectory_" + name + ".csv";
    write_file(fs::path(cfg.output_dir) / file_name, csv.str());

    std::size_t arg_max = 0;
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      if (traj.states[k][col] > traj.states[arg_max][col]) arg_max = k;
    }
    peaks[name] = json{{"t_peak", traj.times[arg_max]},
                       {"value_peak", traj.states[arg_max][col]},
                       {"column", cfg.column}};

    if (cfg.svg) {
      svir::SvgSeries s;
      s.name = name;
      s.x = traj.times;
      for (const auto& st : traj.states) s.y.push_back(st[col]);
      chart.push_back(std::move(s));
    }
  }
  write_file(fs::path(cfg.output_dir) / "peaks.json", peaks.dump(2) + "\n");
  if (cfg.svg) {
    std::ostringstream svg;
    svir::write_svg_chart(svg, cfg.column + " vs time", "t (days)", cfg.column,
                          chart);
    write_file(fs::path(cfg.output_dir) / ("plot_" + cfg.column + ".svg"),
               svg.str());
  }
  std::cout << "simulate: wrote " << members.size() << " trajectory file(s) to "
            << cfg.output_dir << "\n";
  return kExitOk;
}

json guarded(bool& any_failed, const std::function<json()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    any_failed = true;
    return json{{"error", e.what()}};
  }
}

int cmd_analyze(const RunConfig& cfg) {
  cfg.parameters.validate();
  fs::create_directories(cfg.output_dir);
  const svir::Parameters& p = cfg.parameters;
  bool any_failed = false;
  json bundle;

  std::optional<svir::EquilibriumPoint> endemic_point;
  bundle["equilibria"] = guarded(any_failed, [&] {
    json j;
    j["disease_free"] = svir::to_json(svir::disease_free(p));
    const svir::EndemicResult res = svir::endemic(p);
    switch (res.status) {
      case svir::EndemicStatus::Converged:
        endemic_point = res.point;
        j["endemic"] = svir::to_json(*res.point);
        break;
      case svir::EndemicStatus::DfeCoincident:
        j["endemic"] = json{{"status", "dfe_coincident"}};
        break;
      case svir::EndemicStatus::NoConvergence:
        j["endemic"] = json{{"status", "no_convergence"}};
        break;
    }
    return j;
  });
  bundle["reproduction_numbers"] = guarded(any_failed, [&] {
    return svir::to_json(svir::reproduction_numbers(p));
  });
  bundle["stability"] = guarded(any_failed, [&] {
    json j;
    j["dfe"] = svir::to_json(svir::stability_report(p, svir::disease_free(p)));
    if (endemic_point) {
      j["endemic"] = svir::to_json(svir::stability_report(p, *endemic_point));
    } else {
      j["endemic"] = nullptr;
    }
    return j;
  });
  bundle["sensitivity"] = guarded(any_failed, [&] {
    return svir::to_json(svir::sensitivity_indices(p));
  });
  bundle["bifurcation"] = guarded(any_failed, [&] {
    return json{
        {"strain1", svir::to_json(svir::bifurcation_report(p, svir::Strain::Original))},
        {"strain2", svir::to_json(svir::bifurcation_report(p, svir::Strain::Mutant))}};
  });

  write_file(fs::path(cfg.output_dir) / "analyze.json", bundle.dump(2) + "\n");
  std::cout << "analyze: wrote " << (fs::path(cfg.output_dir) / "analyze.json").string()
            << (any_failed ? " (with section errors)" : "") << "\n";
  return any_failed ? kExitAnalysisFailure : kExitOk;
}

int cmd_fit(const RunConfig& cfg, const std::string& data_path) {
  cfg.parameters.validate();
  fs::create_directories(cfg.output_dir);
  std::ifstream in(data_path);
  if (!in) throw UsageError("cannot read data file " + data_path);
  const svir::CaseSeries series = svir::case_series_from_csv(in);

  const svir::FitResult result =
      svir::fit(series, cfg.fit, cfg.parameters, cfg.initial_conditions);

  write_file(fs::path(cfg.output_dir) / "fit_result.json",
             svir::to_json(result).dump(2) + "\n");
  std::ostringstream csv;
  csv << "day,observed,predicted\n";
  char buf[64];
  for (std::size_t i = 0; i < result.days.size(); ++i) {
    csv << result.days[i];
    std::snprintf(buf, sizeof(buf), "%.17g", result.observed[i]);
    csv << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", result.predicted[i]);
    csv << ',' << buf << '\n';
  }
  write_file(fs::path(cfg.output_dir) / "fit_trajectory.csv", csv.str());
  std::cout << "fit: objective " << result.objective << " after "
            << result.evaluations << " evaluations, converged="
            << (result.converged ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_sensitivity(const RunConfig& cfg) {
  cfg.parameters.validate();
  fs::create_directories(cfg.output_dir);
  const svir::SensitivityReport rep = svir::sensitivity_indices(cfg.parameters);
  std::ostringstream csv;
  svir::write_sensitivity_csv(rep, csv);
  write_file(fs::path(cfg.output_dir) / "sensitivity.csv", csv.str());
  write_file(fs::path(cfg.output_dir) / "sensitivity.json",
             svir::to_json(rep).dump(2) + "\n");
  std::cout << "sensitivity: wrote sensitivity.csv and sensitivity.json to "
            << cfg.output_dir << "\n";
  return kExitOk;
}

int cmd_bifurcation(const RunConfig& cfg) {
  cfg.parameters.validate();
  fs::create_directories(cfg.output_dir);
  const json j{
      {"strain1",
       svir::to_json(svir::bifurcation_report(cfg.parameters, svir::Strain::Original))},
      {"strain2",
       svir::to_json(svir::bifurcation_report(cfg.parameters, svir::Strain::Mutant))}};
  write_file(fs::path(cfg.output_dir) / "bifurcation.json", j.dump(2) + "\n");
  std::cout << "bifurcation: wrote bifurcation.json to " << cfg.output_dir << "\n";
  return kExitOk;
}

int cmd_equilibria(const RunConfig& cfg) {
  cfg.parameters.validate();
  fs::create_directories(cfg.output_dir);
  json j;
  j["disease_free"] = svir::to_json(svir::disease_free(cfg.parameters));
  const svir::EndemicResult res = svir::endemic(cfg.parameters);
  if (res.status == svir::EndemicStatus::Converged) {
    j["endemic"] = svir::to_json(*res.point);
  } else {
    j["endemic"] = json{{"status", res.status == svir::EndemicStatus::DfeCoincident
                                       ? "dfe_coincident"
                                       : "no_convergence"}};
  }
  write_file(fs::path(cfg.output_dir) / "equilibria.json", j.dump(2) + "\n");
  std::cout << "equilibria: wrote equilibria.json to " << cfg.output_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-strain imperfect-vaccine epidemic model toolkit"};
  app.require_subcommand(1);

  std::string config_path, sweep_flag, out_flag, data_path, column_flag;
  std::vector<std::string> param_flags;
  bool svg_flag = false;
  std::uint64_t seed_flag = 0;
  double t_end_flag = -1.0, output_step_flag = -1.0, h_flag = -1.0;
  std::string method_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--param", param_flags,
                    "parameter override name=value (repeatable); defaults "
                    "follow the shipped parameter table");
    sub->add_option("--out", out_flag, "output directory (default: out)");
    sub->add_option("--seed", seed_flag,
                    "seed for randomized operations (outputs are "
                    "deterministic given config + seed)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate and export trajectories");
  add_common(simulate);
  simulate->add_option("--sweep", sweep_flag, "sweep spec name=v1,v2,...");
  simulate->add_flag("--svg", svg_flag, "also write an SVG line chart");
  simulate->add_option("--column", column_flag,
                       "column for peaks/SVG: S, V, I1, I2 or R (default I2)");
  simulate->add_option("--t-end", t_end_flag, "integration horizon in days (default 200)");
  simulate->add_option("--output-step", output_step_flag,
                       "output sample spacing in days (default 0.5)");
  simulate->add_option("--method", method_flag, "integrator: dp45 (default) or rk4");
  simulate->add_option("--h", h_flag, "RK4 step / DP45 initial step (default 0.01)");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "equilibria + reproduction numbers + stability + sensitivity + bifurcation");
  add_common(analyze);

  CLI::App* fit_cmd = app.add_subcommand("fit", "least-squares fit of beta1, beta2, m");
  add_common(fit_cmd);
  fit_cmd->add_option("--data", data_path, "CSV file with header day,observed")
      ->required();

  CLI::App* sensitivity = app.add_subcommand(
      "sensitivity", "normalized forward sensitivity indices of R01 and R02");
  add_common(sensitivity);

  CLI::App* bifurcation = app.add_subcommand(
      "bifurcation", "critical transmission rates and normal-form constants");
  add_common(bifurcation);

  CLI::App* equilibria = app.add_subcommand(
      "equilibria", "disease-free and endemic equilibrium points");
  add_common(equilibria);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    apply_param_flags(cfg, param_flags);
    apply_sweep_flag(cfg, sweep_flag);
    if (!out_flag.empty()) cfg.output_dir = out_flag;
    if (svg_flag) cfg.svg = true;
    if (seed_flag != 0) cfg.seed = seed_flag;
    if (!column_flag.empty()) cfg.column = column_flag;
    if (t_end_flag > 0.0) cfg.integrator.t_end = t_end_flag;
    if (output_step_flag > 0.0) cfg.integrator.output_step = output_step_flag;
    if (h_flag > 0.0) cfg.integrator.h = h_flag;
    if (!method_flag.empty()) {
      if (method_flag == "rk4") {
        cfg.integrator.method = svir::Method::RK4;
      } else if (method_flag == "dp45") {
        cfg.integrator.method = svir::Method::DormandPrince45;
      } else {
        throw UsageError("--method must be rk4 or dp45");
      }
    }

    if (simulate->parsed()) return cmd_simulate(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (fit_cmd->parsed()) return cmd_fit(cfg, data_path);
    if (sensitivity->parsed()) return cmd_sensitivity(cfg);
    if (bifurcation->parsed()) return cmd_bifurcation(cfg);
    if (equilibria->parsed()) return cmd_equilibria(cfg);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kExitAnalysisFailure;
  }
}
