#pragma once

#include <vector>

#include "trustnav/geometry.hpp"

namespace trustnav {

/// Parameters of the trust-adaptive barrier constraint.
///
/// gamma(tau) = gamma_ini + delta * tau^lambda maps trust onto the per-step
/// barrier decay budget. gamma_ini + delta <= 1 and lambda >= 1 keep gamma
/// inside [0, 1] for every trust value.
struct CbfParams {
  double R = 3.0;          // safety radius, grid units
  double gamma_ini = 0.03; // decay budget when trust is zero or unavailable
  double delta = 0.08;     // trust sensitivity
  double lambda = 1.5;     // trust penalty exponent

  /// Throws std::invalid_argument quoting the violated condition.
  void validate() const;
};

/// Position and velocity of the ego vehicle or of one pedestrian.
struct AgentState {
  Vec2 position{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};
};

/// Quadratic barrier ||x_e - x_j||^2 - R^2; non-negative iff the pair keeps
/// at least distance R.
double barrier(const Vec2& ego_position, const Vec2& ped_position, double R);

/// Barrier value against every pedestrian; empty list gives an empty vector.
std::vector<double> barrier_vector(const Vec2& ego_position,
                                   const std::vector<AgentState>& pedestrians, double R);

/// True iff every barrier value is non-negative (vacuously true with no
/// pedestrians).
bool in_safe_set(const Vec2& ego_position, const std::vector<AgentState>& pedestrians, double R);

/// Trust-to-gamma map gamma_ini + delta * tau^lambda. Result lies in
/// [gamma_ini, gamma_ini + delta] for valid parameters and tau in [0, 1].
double gamma_from_trust(double tau, const CbfParams& params);

/// Residual of the discrete-time CBF condition
///   h(t+1) >= (1 - gamma) * h(t);
/// the constraint holds iff the returned value is >= 0.
double discrete_cbf_residual(double h_next, double h_curr, double gamma);

}  // namespace trustnav
