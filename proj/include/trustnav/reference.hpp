#pragma once

#include "trustnav/geometry.hpp"

namespace trustnav {

/// Bounded proportional reference generator: kp * (goal - position) scaled,
/// direction-preserving, so its norm never exceeds u_max.
Vec2 reference_velocity(const Vec2& position, const Vec2& goal, double kp, double u_max);

}  // namespace trustnav
