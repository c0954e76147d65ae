#include "trustnav/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trustnav {

void ScenarioConfig::validate() const {
  mpc.validate();
  cbf.validate();
  weights.validate();
  trust_dynamics.validate();
  trait_params.validate();
  if (!(kp > 0.0)) {
    throw std::invalid_argument("kp must be > 0");
  }
  if (!(goal_tol > 0.0)) {
    throw std::invalid_argument("goal_tol must be > 0");
  }
  if (max_steps < 1) {
    throw std::invalid_argument("max_steps must be >= 1");
  }
  if (trust_decimation < 1) {
    throw std::invalid_argument("trust_decimation must be >= 1");
  }
  for (const PedestrianConfig& ped : pedestrians) {
    if (!ped.start.allFinite() || !ped.velocity.allFinite()) {
      throw std::invalid_argument("pedestrian start and velocity must be finite");
    }
    if (ped.trust_mode == TrustMode::fixed) {
      if (!(ped.fixed_trust >= 0.0 && ped.fixed_trust <= 1.0)) {
        throw std::invalid_argument("fixed trust must be in [0,1]");
      }
    } else {
      ped.script.validate();
    }
  }
  if (!ego_start.allFinite() || !goal.allFinite()) {
    throw std::invalid_argument("ego_start and goal must be finite");
  }
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();

  const std::size_t num_peds = config.pedestrians.size();
  const double dt = config.mpc.dt;

  MpcController controller(config.mpc, config.cbf, config.kp, config.goal,
                           config.reference_mode);
  TrustRegistry registry(config.weights, config.trust_dynamics, config.trait_params);

  AgentState ego;
  ego.position = config.ego_start;

  // Trust of a dynamic pedestrian before its first observation: gamma falls
  // back to gamma_ini, i.e. the trust-unavailable base value.
  std::vector<double> trusts(num_peds, 0.0);
  for (std::size_t j = 0; j < num_peds; ++j) {
    if (config.pedestrians[j].trust_mode == TrustMode::fixed) {
      trusts[j] = config.pedestrians[j].fixed_trust;
    }
  }

  ScenarioResult result;
  ScenarioSummary& summary = result.summary;
  summary.min_dist_per_ped.assign(num_peds, std::numeric_limits<double>::infinity());

  for (long step = 0; step < config.max_steps; ++step) {
    if ((ego.position - config.goal).norm() <= config.goal_tol) {
      summary.goal_reached = true;
      summary.steps_to_goal = step;
      break;
    }

    // Pedestrian ground truth stays on the exact constant-velocity line:
    // positions are recomputed from the step index, never accumulated.
    std::vector<AgentState> peds(num_peds);
    for (std::size_t j = 0; j < num_peds; ++j) {
      peds[j].position =
          config.pedestrians[j].start + config.pedestrians[j].velocity * (dt * double(step));
      peds[j].velocity = config.pedestrians[j].velocity;
    }

    // Trust source: constant in fixed mode, trust_engine in dynamic mode.
    for (std::size_t j = 0; j < num_peds; ++j) {
      const PedestrianConfig& ped = config.pedestrians[j];
      if (ped.trust_mode != TrustMode::dynamic) {
        continue;
      }
      if (step % config.trust_decimation == 0) {
        const std::optional<Confidences> c = scripted_confidences(ped.script, step);
        if (c.has_value()) {
          trusts[j] = registry.observe(std::to_string(j), *c, step).trust;
        }
        // Uncovered step: pedestrian unobserved, trust stays frozen.
      }
    }

    auto [control, solution] = controller.step(ego, peds, trusts);

    TraceRow row;
    row.step = step;
    row.time = dt * double(step);
    row.ego_position = ego.position;
    row.control = control;
    row.reference = reference_velocity(ego.position, config.goal, config.kp, config.mpc.u_max);
    row.min_cbf_residual = solution.min_cbf_residual;
    row.status = solution.status;
    row.solve_time = solution.solve_time;
    row.pedestrians.resize(num_peds);

    bool violated = false;
    for (std::size_t j = 0; j < num_peds; ++j) {
      PedTraceEntry& entry = row.pedestrians[j];
      entry.position = peds[j].position;
      entry.distance = (ego.position - peds[j].position).norm();
      entry.trust = trusts[j];
      entry.gamma = gamma_from_trust(trusts[j], config.cbf);
      entry.barrier = barrier(ego.position, peds[j].position, config.cbf.R);
      summary.min_dist_per_ped[j] = std::min(summary.min_dist_per_ped[j], entry.distance);
      if (entry.distance < config.cbf.R - 1e-6) {
        violated = true;
      }
    }
    if (violated) {
      ++summary.violations;
    }
    if (solution.status == SolveStatus::infeasible_fallback) {
      ++summary.fallback_steps;
    }
    summary.total_solve_time_s += solution.solve_time;
    result.trace.push_back(std::move(row));

    // Apply the first control exactly; pedestrians advance on their lines.
    ego = predict_ego(ego, control, dt);
  }

  if (!summary.goal_reached &&
      (ego.position - config.goal).norm() <= config.goal_tol) {
    summary.goal_reached = true;
    summary.steps_to_goal = static_cast<long>(result.trace.size());
  }

  // Fold the final state into the distance statistics (also covers runs
  // that terminate before executing any step).
  const long final_step = result.trace.empty() ? 0 : result.trace.back().step + 1;
  for (std::size_t j = 0; j < num_peds; ++j) {
    const Vec2 ped_pos =
        config.pedestrians[j].start + config.pedestrians[j].velocity * (dt * double(final_step));
    summary.min_dist_per_ped[j] =
        std::min(summary.min_dist_per_ped[j], (ego.position - ped_pos).norm());
  }

  return result;
}

}  // namespace trustnav
