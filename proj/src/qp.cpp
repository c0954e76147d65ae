#include "trustnav/qp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace trustnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Applies the Givens rotation that zeroes dv(j) into dv(j-1), accumulating
// the same rotation into the corresponding column pair of J.
void rotate_into(Eigen::VectorXd& dv, Eigen::MatrixXd& J, int j) {
  double cc = dv(j - 1);
  double ss = dv(j);
  const double h = std::hypot(cc, ss);
  if (h == 0.0) {
    return;
  }
  dv(j) = 0.0;
  ss /= h;
  cc /= h;
  if (cc < 0.0) {
    cc = -cc;
    ss = -ss;
    dv(j - 1) = -h;
  } else {
    dv(j - 1) = h;
  }
  const double xny = ss / (1.0 + cc);
  const int n = static_cast<int>(J.rows());
  for (int k = 0; k < n; ++k) {
    const double t1 = J(k, j - 1);
    const double t2 = J(k, j);
    J(k, j - 1) = t1 * cc + t2 * ss;
    J(k, j) = xny * (t1 + J(k, j - 1)) - t2;
  }
}

// Appends the constraint whose transformed normal is dv to the active-set
// factorization. Returns false when the normal is numerically dependent on
// the active constraints.
bool add_constraint(Eigen::MatrixXd& R, Eigen::MatrixXd& J, Eigen::VectorXd& dv, int& iq,
                    double& R_norm) {
  const int n = static_cast<int>(J.rows());
  for (int j = n - 1; j >= iq + 1; --j) {
    rotate_into(dv, J, j);
  }
  ++iq;
  R.col(iq - 1).head(iq) = dv.head(iq);
  if (std::abs(dv(iq - 1)) <= std::numeric_limits<double>::epsilon() * R_norm) {
    --iq;
    return false;
  }
  R_norm = std::max(R_norm, std::abs(dv(iq - 1)));
  return true;
}

// Removes the active constraint at position qq and restores the
// triangularity of R, rotating J to match.
void delete_constraint(Eigen::MatrixXd& R, Eigen::MatrixXd& J, std::vector<int>& A,
                       Eigen::VectorXd& u, int& iq, int qq) {
  const int n = static_cast<int>(J.rows());
  for (int i = qq; i < iq - 1; ++i) {
    A[static_cast<std::size_t>(i)] = A[static_cast<std::size_t>(i + 1)];
    u(i) = u(i + 1);
    R.col(i) = R.col(i + 1);
  }
  // Slot iq-1 takes the candidate multiplier stored at iq.
  u(iq - 1) = u(iq);
  u(iq) = 0.0;
  A.pop_back();
  R.col(iq - 1).setZero();
  --iq;
  if (iq == 0) {
    return;
  }
  for (int j = qq; j < iq; ++j) {
    double cc = R(j, j);
    double ss = R(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) {
      continue;
    }
    cc /= h;
    ss /= h;
    R(j + 1, j) = 0.0;
    if (cc < 0.0) {
      R(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      R(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < iq; ++k) {
      const double t1 = R(j, k);
      const double t2 = R(j + 1, k);
      R(j, k) = t1 * cc + t2 * ss;
      R(j + 1, k) = xny * (t1 + R(j, k)) - t2;
    }
    for (int k = 0; k < n; ++k) {
      const double t1 = J(k, j);
      const double t2 = J(k, j + 1);
      J(k, j) = t1 * cc + t2 * ss;
      J(k, j + 1) = xny * (J(k, j) + t1) - t2;
    }
  }
}

}  // namespace

QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g0, const Eigen::MatrixXd& C,
                  const Eigen::VectorXd& d) {
  const int n = static_cast<int>(G.rows());
  const int m = static_cast<int>(C.rows());
  if (G.cols() != n || g0.size() != n || (m > 0 && C.cols() != n) || d.size() != m) {
    throw std::invalid_argument("solve_qp: inconsistent dimensions");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("solve_qp: G must be positive definite");
  }

  QpResult result;
  result.multipliers = Eigen::VectorXd::Zero(m);
  result.x = -llt.solve(g0);

  if (m == 0) {
    result.objective = 0.5 * g0.dot(result.x);
    result.feasible = true;
    return result;
  }

  // J = L^{-T}; columns beyond the active-set size span the null space of the
  // active constraint normals in the metric of G.
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  llt.matrixU().template solveInPlace<Eigen::OnTheLeft>(J);

  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  std::vector<int> A;  // active constraint indices, position-aligned with u
  A.reserve(static_cast<std::size_t>(n));
  int iq = 0;
  double R_norm = 1.0;

  Eigen::VectorXd& x = result.x;
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);

  const double feas_tol = 1e-11 * (1.0 + d.cwiseAbs().maxCoeff());
  const int max_iter = 50 * (n + m) + 100;
  int iter = 0;

  while (true) {
    // Most violated inactive constraint.
    int ip = -1;
    double smin = -feas_tol;
    for (int i = 0; i < m; ++i) {
      if (is_active[static_cast<std::size_t>(i)]) {
        continue;
      }
      const double s = C.row(i).dot(x) - d(i);
      if (s < smin) {
        smin = s;
        ip = i;
      }
    }
    if (ip < 0) {
      for (int k = 0; k < iq; ++k) {
        result.multipliers(A[static_cast<std::size_t>(k)]) = u(k);
      }
      result.objective = 0.5 * x.dot(G * x) + g0.dot(x);
      result.feasible = true;
      result.iterations = iter;
      return result;
    }

    const Eigen::VectorXd np = C.row(ip).transpose();
    double s_ip = smin;
    u(iq) = 0.0;  // multiplier of the candidate constraint

    while (true) {
      if (++iter > max_iter) {
        result.feasible = false;
        result.iterations = iter;
        return result;
      }

      Eigen::VectorXd dv = J.transpose() * np;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
      if (iq < n) {
        z = J.rightCols(n - iq) * dv.tail(n - iq);
      }
      Eigen::VectorXd r;
      if (iq > 0) {
        r = R.topLeftCorner(iq, iq).triangularView<Eigen::Upper>().solve(dv.head(iq));
      }

      // Maximum dual step before an active multiplier would turn negative.
      double t1 = kInf;
      int blocking = -1;
      for (int k = 0; k < iq; ++k) {
        if (r(k) > 0.0) {
          const double ratio = u(k) / r(k);
          if (ratio < t1) {
            t1 = ratio;
            blocking = k;
          }
        }
      }

      // Step that makes the candidate constraint exactly satisfied.
      double t2 = kInf;
      const double znorm = z.norm();
      if (znorm > std::numeric_limits<double>::epsilon() * std::sqrt(double(n))) {
        t2 = -s_ip / z.dot(np);
      }

      const double t = std::min(t1, t2);
      if (t >= kInf) {
        // Dual unbounded: the constraints are inconsistent.
        result.feasible = false;
        result.iterations = iter;
        return result;
      }

      if (t2 >= kInf) {
        // Step in dual space only.
        for (int k = 0; k < iq; ++k) {
          u(k) -= t * r(k);
        }
        u(iq) += t;
        is_active[static_cast<std::size_t>(A[static_cast<std::size_t>(blocking)])] = 0;
        delete_constraint(R, J, A, u, iq, blocking);
        continue;
      }

      x += t * z;
      for (int k = 0; k < iq; ++k) {
        u(k) -= t * r(k);
      }
      u(iq) += t;

      if (t == t2) {
        if (add_constraint(R, J, dv, iq, R_norm)) {
          // The candidate multiplier accumulated at slot iq-1 (pre-increment
          // slot iq) is already in place.
          A.push_back(ip);
          is_active[static_cast<std::size_t>(ip)] = 1;
        }
        // On a dependent normal the constraint is satisfied after the full
        // step and stays out of the factorization; the next pass re-checks
        // it and the iteration guard backstops pathological cycling.
        break;
      }

      // Partial step: drop the blocking constraint and keep pushing on the
      // candidate.
      is_active[static_cast<std::size_t>(A[static_cast<std::size_t>(blocking)])] = 0;
      delete_constraint(R, J, A, u, iq, blocking);
      s_ip = C.row(ip).dot(x) - d(ip);
    }
  }
}

}  // namespace trustnav
