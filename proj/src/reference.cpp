#include "trustnav/reference.hpp"

#include <stdexcept>

namespace trustnav {

Vec2 reference_velocity(const Vec2& position, const Vec2& goal, double kp, double u_max) {
  if (!(kp > 0.0)) {
    throw std::invalid_argument("kp must be > 0");
  }
  if (!(u_max > 0.0)) {
    throw std::invalid_argument("u_max must be > 0");
  }
  Vec2 u = kp * (goal - position);
  const double norm = u.norm();
  if (norm > u_max) {
    u *= u_max / norm;
  }
  return u;
}

}  // namespace trustnav
