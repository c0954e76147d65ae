#include "trustnav/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "trustnav/trace_io.hpp"

namespace trustnav {
namespace {

ScenarioConfig base_config() {
  ScenarioConfig cfg;
  cfg.name = "test";
  cfg.mpc.dt = 0.05;
  cfg.mpc.horizon = 7;
  cfg.mpc.u_max = 6.0;
  cfg.ego_start = Vec2(20, 5);
  cfg.goal = Vec2(20, 45);
  cfg.max_steps = 400;
  return cfg;
}

TEST(ReferenceVelocity, BoundedProportionalLaw) {
  EXPECT_NEAR(reference_velocity(Vec2(3, 4), Vec2(3, 4), 1.0, 10.0).norm(), 0.0, 1e-15);

  // Far from the goal: saturated magnitude, direction preserved.
  const Vec2 far = reference_velocity(Vec2(0, 0), Vec2(30, 40), 1.0, 10.0);
  EXPECT_NEAR(far.norm(), 10.0, 1e-12);
  EXPECT_NEAR(far.x() / far.y(), 30.0 / 40.0, 1e-12);

  const Vec2 inside = reference_velocity(Vec2(0, 0), Vec2(3, 4), 1.0, 10.0);
  EXPECT_DOUBLE_EQ(inside.x(), 3.0);
  EXPECT_DOUBLE_EQ(inside.y(), 4.0);

  EXPECT_THROW(reference_velocity(Vec2(0, 0), Vec2(1, 1), 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(reference_velocity(Vec2(0, 0), Vec2(1, 1), 1.0, 0.0), std::invalid_argument);
}

TEST(RunScenario, NoPedestriansReachesGoalOnStraightLine) {
  ScenarioConfig cfg = base_config();
  const ScenarioResult result = run_scenario(cfg);

  ASSERT_TRUE(result.summary.goal_reached);
  // Saturated cruise plus the exponential tail of the proportional law once
  // the remaining distance drops under u_max.
  const double distance = (cfg.goal - cfg.ego_start).norm();
  const long cruise = static_cast<long>(std::ceil(distance / (cfg.mpc.u_max * cfg.mpc.dt)));
  const long tail = static_cast<long>(std::ceil(
      std::log(cfg.mpc.u_max / cfg.goal_tol) / -std::log1p(-cfg.kp * cfg.mpc.dt)));
  EXPECT_LE(result.summary.steps_to_goal, cruise + tail + 5);
  EXPECT_EQ(result.summary.violations, 0);
  EXPECT_EQ(result.summary.fallback_steps, 0);

  for (const TraceRow& row : result.trace) {
    EXPECT_TRUE(row.pedestrians.empty());
    EXPECT_EQ(row.status, SolveStatus::optimal);
    // Straight-line reference: no lateral deviation from x = 20.
    EXPECT_NEAR(row.ego_position.x(), 20.0, 1e-9);
    EXPECT_TRUE(std::isinf(row.min_cbf_residual));
  }
}

TEST(RunScenario, DeterministicTraces) {
  ScenarioConfig cfg = base_config();
  cfg.pedestrians.push_back(PedestrianConfig{Vec2(21, 25), Vec2(0, 0), TrustMode::fixed, 0.5, {}});

  const ScenarioResult a = run_scenario(cfg);
  const ScenarioResult b = run_scenario(cfg);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a.trace, cfg.pedestrians.size());
  write_trace_csv(sb, b.trace, cfg.pedestrians.size());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(RunScenario, PedestrianGroundTruthIsExact) {
  ScenarioConfig cfg = base_config();
  cfg.max_steps = 60;
  cfg.goal_tol = 0.1;
  cfg.pedestrians.push_back(
      PedestrianConfig{Vec2(10, 23), Vec2(2, 3), TrustMode::fixed, 1.0, {}});

  const ScenarioResult result = run_scenario(cfg);
  for (const TraceRow& row : result.trace) {
    const Vec2 expected =
        cfg.pedestrians[0].start + cfg.pedestrians[0].velocity * (cfg.mpc.dt * double(row.step));
    EXPECT_EQ(row.pedestrians[0].position.x(), expected.x());
    EXPECT_EQ(row.pedestrians[0].position.y(), expected.y());
  }
}

TEST(RunScenario, RecordedGammaMatchesTrust) {
  ScenarioConfig cfg = base_config();
  cfg.max_steps = 40;
  cfg.pedestrians.push_back(PedestrianConfig{Vec2(21, 25), Vec2(0, 0), TrustMode::fixed, 0.3, {}});

  const ScenarioResult result = run_scenario(cfg);
  for (const TraceRow& row : result.trace) {
    EXPECT_DOUBLE_EQ(row.pedestrians[0].trust, 0.3);  // fixed mode: constant
    EXPECT_DOUBLE_EQ(row.pedestrians[0].gamma, gamma_from_trust(0.3, cfg.cbf));
    EXPECT_DOUBLE_EQ(row.pedestrians[0].barrier,
                     barrier(row.ego_position, row.pedestrians[0].position, cfg.cbf.R));
  }
}

TEST(RunScenario, DynamicTrustFollowsScriptWithDecimation) {
  ScenarioConfig cfg = base_config();
  cfg.max_steps = 20;
  cfg.goal = Vec2(20, 6);  // ends quickly; trust evolution is the point
  cfg.goal_tol = 0.1;
  cfg.trust_decimation = 2;

  PedestrianConfig ped;
  ped.start = Vec2(40, 40);
  ped.velocity = Vec2(0, 0);
  ped.trust_mode = TrustMode::dynamic;
  ped.script.entries.push_back(ScriptEntry{0, 100, Confidences{0.0, 0.9, 0.9}});
  cfg.pedestrians.push_back(ped);

  const ScenarioResult result = run_scenario(cfg);
  ASSERT_GE(result.trace.size(), 4u);
  // Observation happens on even steps only: odd rows repeat the trust value.
  for (std::size_t i = 0; i + 1 < result.trace.size(); i += 2) {
    EXPECT_DOUBLE_EQ(result.trace[i].pedestrians[0].trust,
                     result.trace[i + 1].pedestrians[0].trust);
  }
  // Monotone regime (alpha = 1) with a clean stream: trust grows across
  // observation steps.
  EXPECT_GT(result.trace.back().pedestrians[0].trust,
            result.trace.front().pedestrians[0].trust);
}

TEST(RunScenario, AttentiveStreamOutpacesDistractedStream) {
  ScenarioConfig cfg = base_config();
  cfg.max_steps = 12;
  cfg.goal = Vec2(20, 44);

  PedestrianConfig attentive;
  attentive.start = Vec2(5, 25);
  attentive.trust_mode = TrustMode::dynamic;
  attentive.script.entries.push_back(ScriptEntry{0, 100, Confidences{0.0, 0.9, 0.9}});
  PedestrianConfig distracted;
  distracted.start = Vec2(35, 25);
  distracted.trust_mode = TrustMode::dynamic;
  distracted.script.entries.push_back(ScriptEntry{0, 100, Confidences{0.9, 0.0, 0.3}});
  cfg.pedestrians.push_back(attentive);
  cfg.pedestrians.push_back(distracted);

  const ScenarioResult result = run_scenario(cfg);
  ASSERT_GE(result.trace.size(), 11u);
  const TraceRow& row = result.trace[10];
  EXPECT_GT(row.pedestrians[0].trust, row.pedestrians[1].trust);
}

TEST(RunScenario, FixedTrustInfluencesClearance) {
  // A pedestrian just off the path: lower trust must produce a larger
  // minimum distance.
  ScenarioConfig cfg = base_config();
  cfg.pedestrians.push_back(PedestrianConfig{Vec2(21, 25), Vec2(0, 0), TrustMode::fixed, 0.0, {}});
  const ScenarioResult low = run_scenario(cfg);
  cfg.pedestrians[0].fixed_trust = 1.0;
  const ScenarioResult high = run_scenario(cfg);

  ASSERT_TRUE(low.summary.goal_reached);
  ASSERT_TRUE(high.summary.goal_reached);
  EXPECT_GE(low.summary.min_dist_per_ped[0], high.summary.min_dist_per_ped[0] + 0.05);
  EXPECT_GE(high.summary.min_dist_per_ped[0], cfg.cbf.R - 1e-3);
}

TEST(RunScenario, InvalidConfigRejectedBeforeStepping) {
  ScenarioConfig cfg = base_config();
  cfg.cbf.gamma_ini = 0.5;
  cfg.cbf.delta = 0.6;
  EXPECT_THROW(run_scenario(cfg), std::invalid_argument);

  ScenarioConfig bad_steps = base_config();
  bad_steps.max_steps = 0;
  EXPECT_THROW(run_scenario(bad_steps), std::invalid_argument);

  ScenarioConfig bad_trust = base_config();
  bad_trust.pedestrians.push_back(
      PedestrianConfig{Vec2(0, 0), Vec2(0, 0), TrustMode::fixed, 1.5, {}});
  EXPECT_THROW(run_scenario(bad_trust), std::invalid_argument);
}

TEST(TraceCsv, HeaderAndRowShape) {
  EXPECT_EQ(trace_csv_header(0),
            "step,time_s,ego_x,ego_y,u_x,u_y,ref_x,ref_y,min_cbf_residual,solver_status,"
            "solve_time_s");
  EXPECT_EQ(trace_csv_header(2),
            "step,time_s,ego_x,ego_y,u_x,u_y,ref_x,ref_y,"
            "ped0_x,ped0_y,ped0_dist,ped0_trust,ped0_gamma,ped0_h,"
            "ped1_x,ped1_y,ped1_dist,ped1_trust,ped1_gamma,ped1_h,"
            "min_cbf_residual,solver_status,solve_time_s");

  ScenarioConfig cfg = base_config();
  cfg.max_steps = 5;
  const ScenarioResult result = run_scenario(cfg);
  std::ostringstream out;
  write_trace_csv(out, result.trace, 0);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
  }
  EXPECT_EQ(rows, result.trace.size() + 1);  // header + one row per step
}

TEST(RunScenario, ClosedLoopSatisfiesPointwiseCbfInequality) {
  // On optimal steps the realized barrier obeys h(t+1) >= (1-gamma) h(t)
  // within solver tolerance, for every pedestrian.
  ScenarioConfig cfg = base_config();
  cfg.pedestrians.push_back(PedestrianConfig{Vec2(21, 25), Vec2(0, 0), TrustMode::fixed, 0.8, {}});
  cfg.pedestrians.push_back(
      PedestrianConfig{Vec2(16, 28), Vec2(0.5, -0.5), TrustMode::fixed, 0.2, {}});

  const ScenarioResult result = run_scenario(cfg);
  ASSERT_GT(result.trace.size(), 1u);
  for (std::size_t i = 0; i + 1 < result.trace.size(); ++i) {
    const TraceRow& now = result.trace[i];
    const TraceRow& next = result.trace[i + 1];
    if (now.status != SolveStatus::optimal) {
      continue;
    }
    for (std::size_t j = 0; j < now.pedestrians.size(); ++j) {
      const double residual = discrete_cbf_residual(next.pedestrians[j].barrier,
                                                    now.pedestrians[j].barrier,
                                                    now.pedestrians[j].gamma);
      EXPECT_GE(residual, -cfg.mpc.solver_tol) << "step " << i << " ped " << j;
    }
  }
}

}  // namespace
}  // namespace trustnav
