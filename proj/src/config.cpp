#include "trustnav/config.hpp"

#include <fstream>
#include <stdexcept>

namespace trustnav {

namespace {

using nlohmann::json;

Vec2 parse_vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument(field + " must be a [x, y] array of numbers");
  }
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

const json& require(const json& doc, const std::string& field) {
  auto it = doc.find(field);
  if (it == doc.end()) {
    throw std::invalid_argument("missing required field: " + field);
  }
  return *it;
}

template <typename T>
T get_or(const json& doc, const std::string& field, T fallback) {
  auto it = doc.find(field);
  if (it == doc.end()) {
    return fallback;
  }
  return it->get<T>();
}

ConfidenceScript parse_script(const json& j, const std::string& field) {
  if (!j.is_array()) {
    throw std::invalid_argument(field + " must be an array of script entries");
  }
  ConfidenceScript script;
  for (const json& e : j) {
    const json& steps = require(e, "steps");
    if (!steps.is_array() || steps.size() != 2) {
      throw std::invalid_argument(field + ".steps must be a [first, last] pair");
    }
    ScriptEntry entry;
    entry.first_step = steps[0].get<long>();
    entry.last_step = steps[1].get<long>();
    entry.values.c_sm = require(e, "c_sm").get<double>();
    entry.values.c_eye = require(e, "c_eye").get<double>();
    entry.values.c_fluc = require(e, "c_fluc").get<double>();
    script.entries.push_back(entry);
  }
  return script;
}

json dump_script(const ConfidenceScript& script) {
  json out = json::array();
  for (const ScriptEntry& e : script.entries) {
    out.push_back({{"steps", {e.first_step, e.last_step}},
                   {"c_sm", e.values.c_sm},
                   {"c_eye", e.values.c_eye},
                   {"c_fluc", e.values.c_fluc}});
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) {
    throw std::invalid_argument("config root must be a JSON object");
  }

  const ScenarioConfig defaults;
  ScenarioConfig cfg;

  cfg.name = get_or<std::string>(doc, "name", defaults.name);
  cfg.mpc.dt = get_or(doc, "dt", defaults.mpc.dt);
  cfg.mpc.horizon = get_or(doc, "horizon", defaults.mpc.horizon);
  cfg.mpc.u_max = get_or(doc, "u_max", defaults.mpc.u_max);
  cfg.mpc.solver_tol = get_or(doc, "solver_tol", defaults.mpc.solver_tol);
  cfg.mpc.max_iters = get_or(doc, "max_iters", defaults.mpc.max_iters);
  cfg.mpc.multistart = get_or(doc, "multistart", defaults.mpc.multistart);
  if (doc.contains("grid_bounds")) {
    const json& gb = doc["grid_bounds"];
    cfg.mpc.state_bounds.lo = parse_vec2(require(gb, "lo"), "grid_bounds.lo");
    cfg.mpc.state_bounds.hi = parse_vec2(require(gb, "hi"), "grid_bounds.hi");
  }

  cfg.cbf.R = get_or(doc, "R", defaults.cbf.R);
  cfg.cbf.gamma_ini = get_or(doc, "gamma_ini", defaults.cbf.gamma_ini);
  cfg.cbf.delta = get_or(doc, "delta", defaults.cbf.delta);
  cfg.cbf.lambda = get_or(doc, "lambda", defaults.cbf.lambda);

  cfg.kp = get_or(doc, "kp", defaults.kp);
  cfg.goal = parse_vec2(require(doc, "goal"), "goal");
  cfg.goal_tol = get_or(doc, "goal_tol", defaults.goal_tol);
  cfg.max_steps = get_or(doc, "max_steps", defaults.max_steps);
  cfg.ego_start = parse_vec2(require(doc, "ego_start"), "ego_start");
  cfg.trust_decimation = get_or(doc, "trust_decimation", defaults.trust_decimation);

  const std::string mode = get_or<std::string>(doc, "reference_mode", "constant");
  if (mode == "constant") {
    cfg.reference_mode = ReferenceMode::constant;
  } else if (mode == "receding") {
    cfg.reference_mode = ReferenceMode::receding;
  } else {
    throw std::invalid_argument("reference_mode must be \"constant\" or \"receding\"");
  }

  if (doc.contains("trust")) {
    const json& t = doc["trust"];
    cfg.trust_dynamics.alpha = get_or(t, "alpha", defaults.trust_dynamics.alpha);
    cfg.trust_dynamics.beta = get_or(t, "beta", defaults.trust_dynamics.beta);
    cfg.trust_dynamics.beta0 = get_or(t, "beta0", defaults.trust_dynamics.beta0);
    if (t.contains("rho")) {
      cfg.weights.rho = t["rho"].get<std::vector<double>>();
    }
    cfg.trait_params.nu1 = get_or(t, "nu1", defaults.trait_params.nu1);
    cfg.trait_params.nu2 = get_or(t, "nu2", defaults.trait_params.nu2);
    cfg.trait_params.nu3 = get_or(t, "nu3", defaults.trait_params.nu3);
    cfg.trait_params.nu01 = get_or(t, "nu01", defaults.trait_params.nu01);
    cfg.trait_params.nu02 = get_or(t, "nu02", defaults.trait_params.nu02);
    cfg.trait_params.nu03 = get_or(t, "nu03", defaults.trait_params.nu03);
  }

  if (doc.contains("pedestrians")) {
    const json& peds = doc["pedestrians"];
    if (!peds.is_array()) {
      throw std::invalid_argument("pedestrians must be an array");
    }
    for (std::size_t j = 0; j < peds.size(); ++j) {
      const json& p = peds[j];
      PedestrianConfig ped;
      ped.start = parse_vec2(require(p, "start"), "pedestrians.start");
      ped.velocity = parse_vec2(require(p, "velocity"), "pedestrians.velocity");
      const std::string tm = get_or<std::string>(p, "trust_mode", "fixed");
      if (tm == "fixed") {
        ped.trust_mode = TrustMode::fixed;
        ped.fixed_trust = require(p, "trust").get<double>();
      } else if (tm == "dynamic") {
        ped.trust_mode = TrustMode::dynamic;
        ped.script = parse_script(require(p, "script"), "pedestrians.script");
      } else {
        throw std::invalid_argument("trust_mode must be \"fixed\" or \"dynamic\"");
      }
      cfg.pedestrians.push_back(std::move(ped));
    }
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path.string() + ": " + e.what());
  }
  return parse_config_json(doc);
}

json effective_config(const ScenarioConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["dt"] = cfg.mpc.dt;
  doc["horizon"] = cfg.mpc.horizon;
  doc["u_max"] = cfg.mpc.u_max;
  doc["solver_tol"] = cfg.mpc.solver_tol;
  doc["max_iters"] = cfg.mpc.max_iters;
  doc["multistart"] = cfg.mpc.multistart;
  doc["grid_bounds"] = {{"lo", {cfg.mpc.state_bounds.lo.x(), cfg.mpc.state_bounds.lo.y()}},
                        {"hi", {cfg.mpc.state_bounds.hi.x(), cfg.mpc.state_bounds.hi.y()}}};
  doc["R"] = cfg.cbf.R;
  doc["gamma_ini"] = cfg.cbf.gamma_ini;
  doc["delta"] = cfg.cbf.delta;
  doc["lambda"] = cfg.cbf.lambda;
  doc["kp"] = cfg.kp;
  doc["goal"] = {cfg.goal.x(), cfg.goal.y()};
  doc["goal_tol"] = cfg.goal_tol;
  doc["max_steps"] = cfg.max_steps;
  doc["ego_start"] = {cfg.ego_start.x(), cfg.ego_start.y()};
  doc["trust_decimation"] = cfg.trust_decimation;
  doc["reference_mode"] =
      cfg.reference_mode == ReferenceMode::constant ? "constant" : "receding";
  doc["trust"] = {{"alpha", cfg.trust_dynamics.alpha},
                  {"beta", cfg.trust_dynamics.beta},
                  {"beta0", cfg.trust_dynamics.beta0},
                  {"rho", cfg.weights.rho},
                  {"nu1", cfg.trait_params.nu1},
                  {"nu2", cfg.trait_params.nu2},
                  {"nu3", cfg.trait_params.nu3},
                  {"nu01", cfg.trait_params.nu01},
                  {"nu02", cfg.trait_params.nu02},
                  {"nu03", cfg.trait_params.nu03}};
  doc["pedestrians"] = json::array();
  for (const PedestrianConfig& ped : cfg.pedestrians) {
    json p;
    p["start"] = {ped.start.x(), ped.start.y()};
    p["velocity"] = {ped.velocity.x(), ped.velocity.y()};
    if (ped.trust_mode == TrustMode::fixed) {
      p["trust_mode"] = "fixed";
      p["trust"] = ped.fixed_trust;
    } else {
      p["trust_mode"] = "dynamic";
      p["script"] = dump_script(ped.script);
    }
    doc["pedestrians"].push_back(std::move(p));
  }
  return doc;
}

}  // namespace trustnav
