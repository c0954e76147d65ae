#pragma once

#include <Eigen/Dense>

namespace trustnav {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned box, used for the workspace grid and state bounds.
struct Box2 {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{50.0, 50.0};

  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  bool valid() const { return lo.x() <= hi.x() && lo.y() <= hi.y(); }
};

}  // namespace trustnav
