#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trustnav/cbf.hpp"
#include "trustnav/geometry.hpp"
#include "trustnav/qp.hpp"

namespace trustnav {

enum class SolveStatus { optimal, feasible_suboptimal, infeasible_fallback };

const char* to_string(SolveStatus status);

/// How the reference velocity is laid out over the prediction horizon.
enum class ReferenceMode {
  constant,  // evaluated once at the current state and held (default)
  receding,  // re-evaluated along the nominal previous-solution trajectory
};

struct MpcParams {
  double dt = 0.05;
  int horizon = 7;
  double u_max = 5.0;  // per-axis control bound (infinity norm)
  Box2 state_bounds{{0.0, 0.0}, {50.0, 50.0}};
  double solver_tol = 1e-6;
  int max_iters = 200;
  bool multistart = true;  // deterministic extra starts on cold solves

  void validate() const;
};

/// Fully assembled finite-horizon problem: decision variables are the
/// horizon's control inputs (single shooting); the pedestrian rollout is
/// precomputed since it does not depend on the controls.
struct MpcProblem {
  AgentState ego;
  std::vector<AgentState> pedestrians;
  std::vector<double> gammas;   // one per pedestrian, each in [0,1]
  std::vector<Vec2> reference;  // one desired velocity per horizon step
  MpcParams params;
  CbfParams cbf;
  // ped_positions[k][j]: pedestrian j at prediction step k, k = 0..horizon.
  std::vector<std::vector<Vec2>> ped_positions;
};

struct MpcSolution {
  std::vector<Vec2> controls;             // horizon entries
  std::vector<AgentState> predicted_ego;  // horizon + 1 entries
  double cost = 0.0;
  SolveStatus status = SolveStatus::infeasible_fallback;
  double min_cbf_residual = 0.0;  // min over all CBF rows; +inf when none
  double solve_time = 0.0;        // seconds, measured
  int iterations = 0;
};

/// Single-integrator prediction: position advances by u * dt, velocity is u.
AgentState predict_ego(const AgentState& state, const Vec2& u, double dt);

/// Constant-velocity rollout to prediction step k; the velocity captured at
/// assembly time is held regardless of horizon depth.
std::vector<AgentState> predict_pedestrians(const std::vector<AgentState>& pedestrians, double dt,
                                            int k);

/// Reference-tracking stage cost ||u - u_ref||^2.
double stage_cost(const Vec2& u, const Vec2& u_ref);

/// Validates shapes and precomputes the pedestrian rollout.
MpcProblem assemble(const AgentState& ego, const std::vector<AgentState>& pedestrians,
                    const std::vector<double>& gammas, const std::vector<Vec2>& reference,
                    const MpcParams& params, const CbfParams& cbf);

/// Nonlinear-program view of an assembled problem, exposed so tests can
/// check analytic gradients against finite differences. The decision vector
/// stacks the horizon's controls: z = [u_0; u_1; ...].
class MpcNlp {
 public:
  explicit MpcNlp(const MpcProblem& problem);

  int num_vars() const { return 2 * horizon_; }
  int num_constraints() const;  // control box + state box + CBF rows
  int num_cbf_constraints() const { return num_peds_ * horizon_; }

  double cost(const Eigen::VectorXd& z) const;
  Eigen::VectorXd cost_gradient(const Eigen::VectorXd& z) const;

  /// Constraint vector g(z); every row is feasible iff g_i(z) >= 0.
  /// Layout: [control box | state box | CBF], CBF rows ordered by step k
  /// then pedestrian j.
  Eigen::VectorXd constraints(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd constraint_jacobian(const Eigen::VectorXd& z) const;

  /// Predicted ego positions for steps 0..horizon under controls z.
  std::vector<Vec2> ego_positions(const Eigen::VectorXd& z) const;

  double min_cbf_residual(const Eigen::VectorXd& z) const;

 private:
  const MpcProblem& problem_;
  int horizon_;
  int num_peds_;
};

/// Solves the assembled problem with an SQP method (identity cost Hessian,
/// linearized constraints, l1-merit line search, elastic relaxation when a
/// subproblem is infeasible). Deterministic for identical inputs. On
/// irrecoverable infeasibility the returned controls are all zero and the
/// status is infeasible_fallback.
MpcSolution solve(const MpcProblem& problem,
                  const std::vector<Vec2>* warm_start = nullptr);

/// Receding-horizon controller: owns the warm-start state, builds the
/// reference, recomputes gamma from the latest trust each step, and applies
/// only the first control of each solution.
class MpcController {
 public:
  MpcController(MpcParams params, CbfParams cbf, double kp, Vec2 goal,
                ReferenceMode mode = ReferenceMode::constant);

  /// One control step. trusts must have one entry per pedestrian.
  std::pair<Vec2, MpcSolution> step(const AgentState& ego,
                                    const std::vector<AgentState>& pedestrians,
                                    const std::vector<double>& trusts);

  void reset();

  const MpcParams& params() const { return params_; }
  const CbfParams& cbf() const { return cbf_; }

 private:
  std::vector<Vec2> build_reference(const AgentState& ego) const;

  MpcParams params_;
  CbfParams cbf_;
  double kp_;
  Vec2 goal_;
  ReferenceMode mode_;
  std::optional<std::vector<Vec2>> previous_controls_;
};

}  // namespace trustnav
