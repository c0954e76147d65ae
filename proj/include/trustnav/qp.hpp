#pragma once

#include <Eigen/Dense>

namespace trustnav {

/// Result of a convex QP solve.
struct QpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per constraint row, zero when inactive
  double objective = 0.0;
  bool feasible = false;
  int iterations = 0;
};

/// Solves
///   min  1/2 x' G x + g0' x
///   s.t. C x >= d
/// with G symmetric positive definite, by the Goldfarb-Idnani dual active-set
/// method. Starts from the unconstrained minimizer and adds violated
/// constraints one at a time, so no feasible starting point is needed.
/// Returns feasible=false when the constraint system has no solution (the
/// dual is unbounded) or the iteration guard trips.
QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g0,
                  const Eigen::MatrixXd& C, const Eigen::VectorXd& d);

}  // namespace trustnav
