#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trustnav/config.hpp"
#include "trustnav/scenario.hpp"
#include "trustnav/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool strict = false;
  bool timings = false;
  int trust_decimation = 0;  // 0 = keep config value
};

// Sweepable numeric fields: trust of pedestrian j ("ped<j>.trust"), horizon,
// gamma_ini, delta, lambda.
void apply_sweep_value(trustnav::ScenarioConfig& cfg, const std::string& param, double value) {
  if (param == "horizon") {
    cfg.mpc.horizon = static_cast<int>(value);
    return;
  }
  if (param == "gamma_ini") {
    cfg.cbf.gamma_ini = value;
    return;
  }
  if (param == "delta") {
    cfg.cbf.delta = value;
    return;
  }
  if (param == "lambda") {
    cfg.cbf.lambda = value;
    return;
  }
  if (param.rfind("ped", 0) == 0) {
    const auto dot = param.find('.');
    if (dot != std::string::npos && param.substr(dot + 1) == "trust") {
      const std::size_t j = std::stoul(param.substr(3, dot - 3));
      if (j >= cfg.pedestrians.size()) {
        throw std::invalid_argument("sweep parameter names pedestrian " + std::to_string(j) +
                                    " but the scenario has " +
                                    std::to_string(cfg.pedestrians.size()));
      }
      if (cfg.pedestrians[j].trust_mode != trustnav::TrustMode::fixed) {
        throw std::invalid_argument("can only sweep the trust of a fixed-trust pedestrian");
      }
      cfg.pedestrians[j].fixed_trust = value;
      return;
    }
  }
  throw std::invalid_argument(
      "unknown sweep parameter \"" + param +
      "\" (expected horizon, gamma_ini, delta, lambda, or ped<j>.trust)");
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  out << doc.dump(2) << "\n";
}

// Runs one scenario instance and writes its trace, summary, and effective
// config. Returns the summary for aggregation.
trustnav::ScenarioSummary execute_run(const trustnav::ScenarioConfig& cfg, const fs::path& out_dir,
                                      const std::string& stem, bool timings) {
  const trustnav::ScenarioResult result = trustnav::run_scenario(cfg);
  trustnav::write_trace_csv(out_dir / (stem + "_trace.csv"), result.trace,
                            cfg.pedestrians.size(), timings);
  write_json(out_dir / (stem + "_summary.json"), trustnav::summary_json(result.summary));
  write_json(out_dir / (stem + "_effective_config.json"), trustnav::effective_config(cfg));
  std::cout << stem << ": steps=" << result.trace.size()
            << " goal_reached=" << (result.summary.goal_reached ? "yes" : "no")
            << " violations=" << result.summary.violations
            << " fallback_steps=" << result.summary.fallback_steps << "\n";
  return result.summary;
}

bool run_failed_strict(const trustnav::ScenarioSummary& summary, long executed_steps) {
  if (summary.violations > 0) {
    return true;
  }
  // All-fallback termination: the run never produced a usable control.
  return executed_steps > 0 && summary.fallback_steps == executed_steps;
}

int command_run(const CommonOptions& opts) {
  trustnav::ScenarioConfig cfg = trustnav::parse_config(opts.config_path);
  if (opts.trust_decimation > 0) {
    cfg.trust_decimation = opts.trust_decimation;
  }
  fs::create_directories(opts.out_dir);
  const trustnav::ScenarioSummary summary =
      execute_run(cfg, opts.out_dir, cfg.name, opts.timings);
  const long steps = summary.steps_to_goal >= 0 ? summary.steps_to_goal
                                                : static_cast<long>(cfg.max_steps);
  if (opts.strict && run_failed_strict(summary, steps)) {
    std::cerr << "strict mode: run ended with safety violations or all-fallback termination\n";
    return 2;
  }
  return 0;
}

int command_sweep(const CommonOptions& opts, const std::string& param,
                  const std::vector<double>& values) {
  trustnav::ScenarioConfig base = trustnav::parse_config(opts.config_path);
  if (opts.trust_decimation > 0) {
    base.trust_decimation = opts.trust_decimation;
  }
  fs::create_directories(opts.out_dir);

  if (values.empty()) {
    const trustnav::ScenarioSummary summary =
        execute_run(base, opts.out_dir, base.name, opts.timings);
    const long steps = summary.steps_to_goal >= 0 ? summary.steps_to_goal
                                                  : static_cast<long>(base.max_steps);
    return (opts.strict && run_failed_strict(summary, steps)) ? 2 : 0;
  }

  json comparison;
  comparison["scenario"] = base.name;
  comparison["param"] = param;
  comparison["runs"] = json::array();
  bool any_failed = false;

  for (double value : values) {
    trustnav::ScenarioConfig cfg = base;
    apply_sweep_value(cfg, param, value);
    cfg.validate();
    // Stable file stem: <name>_<param>=<value>
    const std::string value_str = param == "horizon"
                                      ? std::to_string(static_cast<int>(value))
                                      : json(value).dump();
    const std::string stem = base.name + "_" + param + "=" + value_str;
    const trustnav::ScenarioSummary summary = execute_run(cfg, opts.out_dir, stem, opts.timings);
    const long steps = summary.steps_to_goal >= 0 ? summary.steps_to_goal
                                                  : static_cast<long>(cfg.max_steps);
    any_failed = any_failed || run_failed_strict(summary, steps);

    json entry;
    entry["value"] = value;
    entry["min_dist_per_ped"] = summary.min_dist_per_ped;
    entry["steps_to_goal"] = summary.steps_to_goal;
    entry["goal_reached"] = summary.goal_reached;
    entry["violations"] = summary.violations;
    entry["fallback_steps"] = summary.fallback_steps;
    comparison["runs"].push_back(std::move(entry));
  }

  write_json(fs::path(opts.out_dir) / (base.name + "_sweep_" + param + ".json"), comparison);
  if (opts.strict && any_failed) {
    std::cerr << "strict mode: at least one sweep run failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-aware safe navigation scenarios: trust estimation, "
               "trust-adaptive CBF constraints, and receding-horizon MPC in a "
               "deterministic 2D simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Run a single scenario");
  run->add_option("config", run_opts.config_path, "Scenario config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", run_opts.out_dir, "Output directory");
  run->add_flag("--strict", run_opts.strict, "Nonzero exit on safety violations");
  run->add_flag("--timings", run_opts.timings, "Record measured solve times in the trace CSV");
  run->add_option("--trust-decimation", run_opts.trust_decimation,
                  "Update dynamic trust every N-th step");

  CommonOptions sweep_opts;
  std::string sweep_param;
  std::vector<double> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep->add_option("config", sweep_opts.config_path, "Scenario config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--param", sweep_param,
                    "Parameter to sweep: horizon, gamma_ini, delta, lambda, or ped<j>.trust")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_opts.out_dir, "Output directory");
  sweep->add_flag("--strict", sweep_opts.strict, "Nonzero exit if any run has violations");
  sweep->add_flag("--timings", sweep_opts.timings,
                  "Record measured solve times in the trace CSVs");
  sweep->add_option("--trust-decimation", sweep_opts.trust_decimation,
                    "Update dynamic trust every N-th step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return command_run(run_opts);
    }
    return command_sweep(sweep_opts, sweep_param, sweep_values);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
