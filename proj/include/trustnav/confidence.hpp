#pragma once

#include <optional>
#include <vector>

#include "trustnav/geometry.hpp"
#include "trustnav/trust.hpp"

namespace trustnav {

/// Number of body keypoints in an estimated pose.
inline constexpr int kNumKeypoints = 17;

/// Absolute pose keypoints of one pedestrian in image pixels, together with
/// the bounding box that isolates them.
struct PoseKeypoints {
  std::vector<Vec2> points;  // exactly kNumKeypoints entries
  Vec2 bbox_origin{0.0, 0.0};  // top-left corner
  Vec2 bbox_dims{1.0, 1.0};    // width/height, strictly positive

  void validate() const;
};

/// Keypoints normalized to the bounding box: (p - origin) / dims, element-wise.
/// Throws on degenerate (non-positive) box dimensions.
std::vector<Vec2> relative_keypoints(const PoseKeypoints& pose);

/// Pose-steadiness confidence: sensitivity * N_k divided by the total L2
/// deviation between consecutive relative poses, clamped to [0, 1]. A zero
/// deviation means a perfectly steady pose and yields 1.
double fluctuation_confidence(const std::vector<Vec2>& current, const std::vector<Vec2>& previous,
                              double sensitivity);

/// One segment of a scripted confidence stream, covering steps
/// [first_step, last_step] inclusive.
struct ScriptEntry {
  long first_step = 0;
  long last_step = 0;
  Confidences values;
};

/// Piecewise-constant confidence stream standing in for the image classifiers.
/// Steps not covered by any entry mean the pedestrian was not observed.
struct ConfidenceScript {
  std::vector<ScriptEntry> entries;

  /// Throws unless entries are ascending, non-overlapping, and all
  /// confidences lie in [0, 1].
  void validate() const;

  std::optional<Confidences> at(long step) const;
};

/// Looks up the confidence triple for a step; nullopt when the step is not
/// covered (missing observation).
std::optional<Confidences> scripted_confidences(const ConfidenceScript& script, long step);

}  // namespace trustnav
