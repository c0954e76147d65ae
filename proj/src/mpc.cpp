#include "trustnav/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trustnav/reference.hpp"

namespace trustnav {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::feasible_suboptimal:
      return "feasible_suboptimal";
    case SolveStatus::infeasible_fallback:
      return "infeasible_fallback";
  }
  return "unknown";
}

void MpcParams::validate() const {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be > 0");
  }
  if (horizon < 1) {
    throw std::invalid_argument("horizon must be >= 1");
  }
  if (!(u_max > 0.0)) {
    throw std::invalid_argument("u_max must be > 0");
  }
  if (!(solver_tol > 0.0)) {
    throw std::invalid_argument("solver_tol must be > 0");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("max_iters must be >= 1");
  }
  if (!state_bounds.valid()) {
    throw std::invalid_argument("state_bounds box must satisfy lo <= hi");
  }
}

AgentState predict_ego(const AgentState& state, const Vec2& u, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be > 0");
  }
  return AgentState{state.position + u * dt, u};
}

std::vector<AgentState> predict_pedestrians(const std::vector<AgentState>& pedestrians, double dt,
                                            int k) {
  if (k < 0) {
    throw std::invalid_argument("prediction step k must be >= 0");
  }
  std::vector<AgentState> out;
  out.reserve(pedestrians.size());
  const double horizon_time = dt * static_cast<double>(k);
  for (const AgentState& ped : pedestrians) {
    out.push_back(AgentState{ped.position + ped.velocity * horizon_time, ped.velocity});
  }
  return out;
}

double stage_cost(const Vec2& u, const Vec2& u_ref) { return (u - u_ref).squaredNorm(); }

MpcProblem assemble(const AgentState& ego, const std::vector<AgentState>& pedestrians,
                    const std::vector<double>& gammas, const std::vector<Vec2>& reference,
                    const MpcParams& params, const CbfParams& cbf) {
  params.validate();
  cbf.validate();
  if (gammas.size() != pedestrians.size()) {
    throw std::invalid_argument("gammas must have one entry per pedestrian");
  }
  for (double g : gammas) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw std::invalid_argument("every gamma must be in [0,1]");
    }
  }
  if (static_cast<int>(reference.size()) != params.horizon) {
    throw std::invalid_argument("reference must have one velocity per horizon step");
  }
  if (!ego.position.allFinite() || !ego.velocity.allFinite()) {
    throw std::invalid_argument("ego state must be finite");
  }
  for (const AgentState& ped : pedestrians) {
    if (!ped.position.allFinite() || !ped.velocity.allFinite()) {
      throw std::invalid_argument("pedestrian states must be finite");
    }
  }

  MpcProblem problem;
  problem.ego = ego;
  problem.pedestrians = pedestrians;
  problem.gammas = gammas;
  problem.reference = reference;
  problem.params = params;
  problem.cbf = cbf;
  problem.ped_positions.reserve(static_cast<std::size_t>(params.horizon) + 1);
  for (int k = 0; k <= params.horizon; ++k) {
    const std::vector<AgentState> rolled = predict_pedestrians(pedestrians, params.dt, k);
    std::vector<Vec2> positions;
    positions.reserve(rolled.size());
    for (const AgentState& ped : rolled) {
      positions.push_back(ped.position);
    }
    problem.ped_positions.push_back(std::move(positions));
  }
  return problem;
}

MpcNlp::MpcNlp(const MpcProblem& problem)
    : problem_(problem),
      horizon_(problem.params.horizon),
      num_peds_(static_cast<int>(problem.pedestrians.size())) {}

int MpcNlp::num_constraints() const {
  return 4 * horizon_ + 4 * horizon_ + num_peds_ * horizon_;
}

double MpcNlp::cost(const Eigen::VectorXd& z) const {
  double total = 0.0;
  for (int k = 0; k < horizon_; ++k) {
    total += stage_cost(z.segment<2>(2 * k), problem_.reference[static_cast<std::size_t>(k)]);
  }
  return total;
}

Eigen::VectorXd MpcNlp::cost_gradient(const Eigen::VectorXd& z) const {
  Eigen::VectorXd grad(num_vars());
  for (int k = 0; k < horizon_; ++k) {
    grad.segment<2>(2 * k) =
        2.0 * (z.segment<2>(2 * k) - problem_.reference[static_cast<std::size_t>(k)]);
  }
  return grad;
}

std::vector<Vec2> MpcNlp::ego_positions(const Eigen::VectorXd& z) const {
  std::vector<Vec2> positions;
  positions.reserve(static_cast<std::size_t>(horizon_) + 1);
  positions.push_back(problem_.ego.position);
  Vec2 pos = problem_.ego.position;
  for (int k = 0; k < horizon_; ++k) {
    pos += z.segment<2>(2 * k) * problem_.params.dt;
    positions.push_back(pos);
  }
  return positions;
}

Eigen::VectorXd MpcNlp::constraints(const Eigen::VectorXd& z) const {
  const MpcParams& p = problem_.params;
  Eigen::VectorXd g(num_constraints());
  int row = 0;

  // Control box: u_max - z_i >= 0 and z_i + u_max >= 0.
  for (int i = 0; i < num_vars(); ++i) {
    g(row++) = p.u_max - z(i);
    g(row++) = z(i) + p.u_max;
  }

  // State box on predicted positions, steps 1..horizon.
  const std::vector<Vec2> positions = ego_positions(z);
  for (int k = 1; k <= horizon_; ++k) {
    const Vec2& pos = positions[static_cast<std::size_t>(k)];
    for (int c = 0; c < 2; ++c) {
      g(row++) = p.state_bounds.hi(c) - pos(c);
      g(row++) = pos(c) - p.state_bounds.lo(c);
    }
  }

  // Discrete CBF rows, step-major then pedestrian.
  for (int k = 0; k < horizon_; ++k) {
    for (int j = 0; j < num_peds_; ++j) {
      const double h_curr =
          barrier(positions[static_cast<std::size_t>(k)],
                  problem_.ped_positions[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)],
                  problem_.cbf.R);
      const double h_next = barrier(
          positions[static_cast<std::size_t>(k) + 1],
          problem_.ped_positions[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(j)],
          problem_.cbf.R);
      g(row++) =
          discrete_cbf_residual(h_next, h_curr, problem_.gammas[static_cast<std::size_t>(j)]);
    }
  }
  return g;
}

Eigen::MatrixXd MpcNlp::constraint_jacobian(const Eigen::VectorXd& z) const {
  const MpcParams& p = problem_.params;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(num_constraints(), num_vars());
  int row = 0;

  for (int i = 0; i < num_vars(); ++i) {
    jac(row++, i) = -1.0;
    jac(row++, i) = 1.0;
  }

  for (int k = 1; k <= horizon_; ++k) {
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < k; ++i) {
        jac(row, 2 * i + c) = -p.dt;
        jac(row + 1, 2 * i + c) = p.dt;
      }
      row += 2;
    }
  }

  const std::vector<Vec2> positions = ego_positions(z);
  for (int k = 0; k < horizon_; ++k) {
    for (int j = 0; j < num_peds_; ++j) {
      const Vec2 diff_next =
          positions[static_cast<std::size_t>(k) + 1] -
          problem_.ped_positions[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(j)];
      const Vec2 diff_curr =
          positions[static_cast<std::size_t>(k)] -
          problem_.ped_positions[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      const double retain = 1.0 - problem_.gammas[static_cast<std::size_t>(j)];
      // d h(pos(k+1)) / d u_i = 2 dt (pos(k+1) - ped(k+1)) for i <= k;
      // the h(pos(k)) term only reaches controls i < k.
      for (int i = 0; i <= k; ++i) {
        jac.block<1, 2>(row, 2 * i) += 2.0 * p.dt * diff_next.transpose();
      }
      for (int i = 0; i < k; ++i) {
        jac.block<1, 2>(row, 2 * i) -= retain * 2.0 * p.dt * diff_curr.transpose();
      }
      ++row;
    }
  }
  return jac;
}

double MpcNlp::min_cbf_residual(const Eigen::VectorXd& z) const {
  if (num_cbf_constraints() == 0) {
    return kInf;
  }
  const Eigen::VectorXd g = constraints(z);
  return g.tail(num_cbf_constraints()).minCoeff();
}

namespace {

struct SqpOutcome {
  Eigen::VectorXd z;
  double cost = kInf;
  double violation = kInf;
  bool converged = false;
  int iterations = 0;
};

double violation_inf(const Eigen::VectorXd& g) {
  double v = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    v = std::max(v, -g(i));
  }
  return v;
}

double violation_l1(const Eigen::VectorXd& g) {
  double v = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    v += std::max(0.0, -g(i));
  }
  return v;
}

// One SQP run from a fixed starting point. The QP subproblem keeps the exact
// (constant) cost Hessian 2I and linearizes the constraints; when the
// linearization is infeasible an elastic subproblem with a shared slack
// variable is solved instead.
SqpOutcome solve_sqp(const MpcNlp& nlp, const Eigen::VectorXd& z0, double tol, int max_iters) {
  const int n = nlp.num_vars();
  const int m = nlp.num_constraints();

  SqpOutcome out;
  out.z = z0;

  Eigen::VectorXd z = z0;
  double merit_weight = 10.0;

  Eigen::VectorXd best_feasible;
  double best_feasible_cost = kInf;

  const Eigen::MatrixXd G = 2.0 * Eigen::MatrixXd::Identity(n, n);

  for (int it = 0; it < max_iters; ++it) {
    ++out.iterations;
    const Eigen::VectorXd g = nlp.constraints(z);
    const Eigen::MatrixXd J = nlp.constraint_jacobian(z);
    const Eigen::VectorXd grad = nlp.cost_gradient(z);
    const double viol = violation_inf(g);

    if (viol <= tol) {
      const double c = nlp.cost(z);
      if (c < best_feasible_cost) {
        best_feasible_cost = c;
        best_feasible = z;
      }
    }

    QpResult qp = solve_qp(G, grad, J, -g);
    Eigen::VectorXd step;
    if (qp.feasible) {
      step = qp.x;
    } else {
      // Elastic relaxation: minimize the same objective plus a heavily
      // penalized shared slack on every row.
      Eigen::MatrixXd Ge = Eigen::MatrixXd::Zero(n + 1, n + 1);
      Ge.topLeftCorner(n, n) = G;
      Ge(n, n) = 1e-4;
      Eigen::VectorXd g0e(n + 1);
      g0e.head(n) = grad;
      g0e(n) = 1e8;
      Eigen::MatrixXd Ce = Eigen::MatrixXd::Zero(m + 1, n + 1);
      Ce.topLeftCorner(m, n) = J;
      Ce.col(n).head(m).setOnes();
      Ce(m, n) = 1.0;  // slack >= 0
      Eigen::VectorXd de(m + 1);
      de.head(m) = -g;
      de(m) = 0.0;
      QpResult elastic = solve_qp(Ge, g0e, Ce, de);
      if (!elastic.feasible) {
        break;  // numerical dead end; fall through to the status checks
      }
      step = elastic.x.head(n);
      qp.multipliers = elastic.multipliers.head(m);
    }

    const double step_norm = step.lpNorm<Eigen::Infinity>();
    if (step_norm <= 1e-10 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      if (viol <= tol) {
        out.converged = true;
      }
      break;
    }

    // l1 merit line search; the penalty must dominate the multipliers.
    const double lambda_max = qp.multipliers.size() > 0 ? qp.multipliers.cwiseAbs().maxCoeff() : 0.0;
    merit_weight = std::max(merit_weight, 2.0 * lambda_max + 1.0);
    const double merit0 = nlp.cost(z) + merit_weight * violation_l1(g);
    const double descent = grad.dot(step) - merit_weight * violation_l1(g);

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::VectorXd trial = z + t * step;
      const double merit_trial =
          nlp.cost(trial) + merit_weight * violation_l1(nlp.constraints(trial));
      if (merit_trial <= merit0 + 1e-4 * t * descent) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      break;  // no merit progress at the smallest trial step
    }
    z += t * step;
  }

  const Eigen::VectorXd g_final = nlp.constraints(z);
  out.z = z;
  out.cost = nlp.cost(z);
  out.violation = violation_inf(g_final);

  // Never return a worse point than a feasible iterate already visited.
  if (best_feasible.size() > 0 &&
      (out.violation > tol || best_feasible_cost < out.cost - 1e-12)) {
    if (best_feasible_cost <= out.cost || out.violation > tol) {
      out.z = best_feasible;
      out.cost = best_feasible_cost;
      out.violation = violation_inf(nlp.constraints(best_feasible));
      out.converged = out.converged && (out.z - z).lpNorm<Eigen::Infinity>() == 0.0;
    }
  }
  return out;
}

Eigen::VectorXd clamp_to_box(Eigen::VectorXd z, double bound) {
  for (int i = 0; i < z.size(); ++i) {
    z(i) = std::min(bound, std::max(-bound, z(i)));
  }
  return z;
}

Eigen::VectorXd stack_controls(const std::vector<Vec2>& controls) {
  Eigen::VectorXd z(2 * static_cast<int>(controls.size()));
  for (std::size_t k = 0; k < controls.size(); ++k) {
    z.segment<2>(2 * static_cast<int>(k)) = controls[k];
  }
  return z;
}

}  // namespace

MpcSolution solve(const MpcProblem& problem, const std::vector<Vec2>* warm_start) {
  const auto t_begin = std::chrono::steady_clock::now();
  const MpcParams& params = problem.params;
  const int horizon = params.horizon;
  const int n = 2 * horizon;

  if (warm_start != nullptr && static_cast<int>(warm_start->size()) != horizon) {
    throw std::invalid_argument("warm start must have one control per horizon step");
  }

  MpcNlp nlp(problem);

  Eigen::VectorXd zref(n);
  for (int k = 0; k < horizon; ++k) {
    zref.segment<2>(2 * k) = problem.reference[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd z_reference = clamp_to_box(zref, params.u_max);

  std::vector<Eigen::VectorXd> starts;
  if (warm_start != nullptr) {
    starts.push_back(clamp_to_box(stack_controls(*warm_start), params.u_max));
  }
  starts.push_back(z_reference);
  if (params.multistart) {
    starts.push_back(Eigen::VectorXd::Zero(n));
    // Lateral alternatives: the reference rotated a quarter turn each way.
    Eigen::VectorXd left(n), right(n);
    for (int k = 0; k < horizon; ++k) {
      const Vec2 r = problem.reference[static_cast<std::size_t>(k)];
      left.segment<2>(2 * k) = Vec2(-r.y(), r.x());
      right.segment<2>(2 * k) = Vec2(r.y(), -r.x());
    }
    starts.push_back(clamp_to_box(left, params.u_max));
    starts.push_back(clamp_to_box(right, params.u_max));
  }

  // Deduplicate identical starting points, keeping first occurrences.
  std::vector<Eigen::VectorXd> unique_starts;
  for (const Eigen::VectorXd& s : starts) {
    bool seen = false;
    for (const Eigen::VectorXd& u : unique_starts) {
      if ((s - u).lpNorm<Eigen::Infinity>() < 1e-14) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      unique_starts.push_back(s);
    }
  }

  SqpOutcome best;
  bool have_best = false;
  int total_iterations = 0;
  for (std::size_t idx = 0; idx < unique_starts.size(); ++idx) {
    SqpOutcome outcome = solve_sqp(nlp, unique_starts[idx], params.solver_tol, params.max_iters);
    total_iterations += outcome.iterations;
    const bool outcome_feasible = outcome.violation <= params.solver_tol;
    if (!have_best) {
      best = outcome;
      have_best = true;
    } else {
      const bool best_feasible = best.violation <= params.solver_tol;
      if ((outcome_feasible && !best_feasible) ||
          (outcome_feasible == best_feasible &&
           (outcome_feasible ? outcome.cost < best.cost - 1e-12
                             : outcome.violation < best.violation - 1e-12))) {
        best = outcome;
      }
    }
    // A converged warm start wins immediately; keeps the receding-horizon
    // loop from flip-flopping between symmetric basins.
    if (idx == 0 && warm_start != nullptr && outcome.converged &&
        outcome.violation <= params.solver_tol) {
      break;
    }
  }

  MpcSolution solution;
  solution.iterations = total_iterations;

  const bool feasible = have_best && best.violation <= params.solver_tol;
  Eigen::VectorXd z_final;
  if (feasible) {
    solution.status =
        best.converged ? SolveStatus::optimal : SolveStatus::feasible_suboptimal;
    z_final = best.z;
  } else {
    solution.status = SolveStatus::infeasible_fallback;
    z_final = Eigen::VectorXd::Zero(n);
  }

  solution.controls.reserve(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) {
    solution.controls.emplace_back(z_final.segment<2>(2 * k));
  }
  solution.cost = nlp.cost(z_final);
  solution.min_cbf_residual = nlp.min_cbf_residual(z_final);

  solution.predicted_ego.reserve(static_cast<std::size_t>(horizon) + 1);
  solution.predicted_ego.push_back(problem.ego);
  AgentState state = problem.ego;
  for (int k = 0; k < horizon; ++k) {
    state = predict_ego(state, solution.controls[static_cast<std::size_t>(k)], params.dt);
    solution.predicted_ego.push_back(state);
  }

  solution.solve_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return solution;
}

MpcController::MpcController(MpcParams params, CbfParams cbf, double kp, Vec2 goal,
                             ReferenceMode mode)
    : params_(params), cbf_(cbf), kp_(kp), goal_(goal), mode_(mode) {
  params_.validate();
  cbf_.validate();
  if (!(kp > 0.0)) {
    throw std::invalid_argument("kp must be > 0");
  }
}

void MpcController::reset() { previous_controls_.reset(); }

std::vector<Vec2> MpcController::build_reference(const AgentState& ego) const {
  std::vector<Vec2> reference;
  reference.reserve(static_cast<std::size_t>(params_.horizon));
  if (mode_ == ReferenceMode::constant || !previous_controls_.has_value()) {
    const Vec2 u_ref = reference_velocity(ego.position, goal_, kp_, params_.u_max);
    if (mode_ == ReferenceMode::constant) {
      reference.assign(static_cast<std::size_t>(params_.horizon), u_ref);
      return reference;
    }
    // Receding mode without a previous solution: roll the reference law
    // through its own greedy trajectory.
    Vec2 pos = ego.position;
    for (int k = 0; k < params_.horizon; ++k) {
      const Vec2 u = reference_velocity(pos, goal_, kp_, params_.u_max);
      reference.push_back(u);
      pos += u * params_.dt;
    }
    return reference;
  }

  // Receding mode: evaluate the law along the shifted previous solution.
  Vec2 pos = ego.position;
  const std::vector<Vec2>& prev = *previous_controls_;
  for (int k = 0; k < params_.horizon; ++k) {
    reference.push_back(reference_velocity(pos, goal_, kp_, params_.u_max));
    const std::size_t idx = std::min(static_cast<std::size_t>(k + 1), prev.size() - 1);
    pos += prev[idx] * params_.dt;
  }
  return reference;
}

std::pair<Vec2, MpcSolution> MpcController::step(const AgentState& ego,
                                                 const std::vector<AgentState>& pedestrians,
                                                 const std::vector<double>& trusts) {
  if (trusts.size() != pedestrians.size()) {
    throw std::invalid_argument("trusts must have one entry per pedestrian");
  }
  std::vector<double> gammas;
  gammas.reserve(trusts.size());
  for (double tau : trusts) {
    gammas.push_back(gamma_from_trust(tau, cbf_));
  }

  const std::vector<Vec2> reference = build_reference(ego);
  const MpcProblem problem = assemble(ego, pedestrians, gammas, reference, params_, cbf_);

  std::optional<std::vector<Vec2>> warm;
  if (previous_controls_.has_value()) {
    // Shift by one step and repeat the last element.
    std::vector<Vec2> shifted(previous_controls_->begin() + 1, previous_controls_->end());
    shifted.push_back(previous_controls_->back());
    warm = std::move(shifted);
  }

  MpcSolution solution = solve(problem, warm.has_value() ? &*warm : nullptr);

  if (solution.status == SolveStatus::infeasible_fallback) {
    previous_controls_.reset();
  } else {
    previous_controls_ = solution.controls;
  }

  return {solution.controls.front(), solution};
}

}  // namespace trustnav
