#pragma once

#include <string>
#include <vector>

#include "trustnav/cbf.hpp"
#include "trustnav/confidence.hpp"
#include "trustnav/geometry.hpp"
#include "trustnav/mpc.hpp"
#include "trustnav/reference.hpp"
#include "trustnav/trust.hpp"

namespace trustnav {

enum class TrustMode { fixed, dynamic };

struct PedestrianConfig {
  Vec2 start{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};
  TrustMode trust_mode = TrustMode::fixed;
  double fixed_trust = 1.0;      // used in fixed mode
  ConfidenceScript script;       // used in dynamic mode
};

/// Declarative definition of one closed-loop experiment.
struct ScenarioConfig {
  std::string name = "scenario";
  MpcParams mpc;  // dt, horizon, u_max, state bounds, solver settings
  CbfParams cbf;  // R, gamma_ini, delta, lambda
  double kp = 1.0;
  Vec2 goal{0.0, 0.0};
  double goal_tol = 0.5;
  int max_steps = 400;
  Vec2 ego_start{0.0, 0.0};
  std::vector<PedestrianConfig> pedestrians;
  TraitWeights weights;
  TrustDynamicsParams trust_dynamics;
  TraitParams trait_params;
  int trust_decimation = 1;  // dynamic trust updates every N-th step
  ReferenceMode reference_mode = ReferenceMode::constant;

  void validate() const;
};

struct PedTraceEntry {
  Vec2 position{0.0, 0.0};
  double distance = 0.0;
  double trust = 0.0;
  double gamma = 0.0;
  double barrier = 0.0;
};

/// One executed simulation step.
struct TraceRow {
  long step = 0;
  double time = 0.0;
  Vec2 ego_position{0.0, 0.0};
  Vec2 control{0.0, 0.0};
  Vec2 reference{0.0, 0.0};
  std::vector<PedTraceEntry> pedestrians;
  double min_cbf_residual = 0.0;
  SolveStatus status = SolveStatus::optimal;
  double solve_time = 0.0;
};

struct ScenarioSummary {
  std::vector<double> min_dist_per_ped;
  long steps_to_goal = -1;  // -1 when the goal was not reached
  bool goal_reached = false;
  long violations = 0;      // steps where some distance dipped below R
  long fallback_steps = 0;
  double total_solve_time_s = 0.0;
};

struct ScenarioResult {
  std::vector<TraceRow> trace;
  ScenarioSummary summary;
};

/// Runs the closed loop: trust update, gamma update, controller step, exact
/// application of the first control, constant-velocity pedestrian motion.
/// Terminates on goal_tol or max_steps. Deterministic: identical configs
/// produce bitwise-identical traces.
ScenarioResult run_scenario(const ScenarioConfig& config);

}  // namespace trustnav
