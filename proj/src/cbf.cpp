#include "trustnav/cbf.hpp"

#include <cmath>
#include <stdexcept>

namespace trustnav {

void CbfParams::validate() const {
  if (!(R > 0.0)) {
    throw std::invalid_argument("R must be > 0");
  }
  if (!(gamma_ini >= 0.0)) {
    throw std::invalid_argument("gamma_ini must be >= 0");
  }
  if (!(delta >= 0.0)) {
    throw std::invalid_argument("delta must be >= 0");
  }
  if (!(gamma_ini + delta <= 1.0)) {
    throw std::invalid_argument("gamma_ini + delta must be <= 1");
  }
  if (!(lambda >= 1.0)) {
    throw std::invalid_argument("lambda must be >= 1");
  }
}

double barrier(const Vec2& ego_position, const Vec2& ped_position, double R) {
  return (ego_position - ped_position).squaredNorm() - R * R;
}

std::vector<double> barrier_vector(const Vec2& ego_position,
                                   const std::vector<AgentState>& pedestrians, double R) {
  std::vector<double> values;
  values.reserve(pedestrians.size());
  for (const AgentState& ped : pedestrians) {
    values.push_back(barrier(ego_position, ped.position, R));
  }
  return values;
}

bool in_safe_set(const Vec2& ego_position, const std::vector<AgentState>& pedestrians, double R) {
  for (const AgentState& ped : pedestrians) {
    if (barrier(ego_position, ped.position, R) < 0.0) {
      return false;
    }
  }
  return true;
}

double gamma_from_trust(double tau, const CbfParams& params) {
  params.validate();
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("trust must be in [0,1]");
  }
  return params.gamma_ini + params.delta * std::pow(tau, params.lambda);
}

double discrete_cbf_residual(double h_next, double h_curr, double gamma) {
  return h_next - (1.0 - gamma) * h_curr;
}

}  // namespace trustnav
