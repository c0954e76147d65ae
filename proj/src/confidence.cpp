#include "trustnav/confidence.hpp"

#include <stdexcept>

namespace trustnav {

void PoseKeypoints::validate() const {
  if (static_cast<int>(points.size()) != kNumKeypoints) {
    throw std::invalid_argument("pose must have exactly 17 keypoints");
  }
  if (!(bbox_dims.x() > 0.0 && bbox_dims.y() > 0.0)) {
    throw std::invalid_argument("bounding box dimensions must be strictly positive");
  }
}

std::vector<Vec2> relative_keypoints(const PoseKeypoints& pose) {
  pose.validate();
  std::vector<Vec2> rel;
  rel.reserve(pose.points.size());
  for (const Vec2& p : pose.points) {
    rel.emplace_back((p - pose.bbox_origin).cwiseQuotient(pose.bbox_dims));
  }
  return rel;
}

double fluctuation_confidence(const std::vector<Vec2>& current, const std::vector<Vec2>& previous,
                              double sensitivity) {
  if (current.size() != previous.size()) {
    throw std::invalid_argument("pose keypoint lists must have the same length");
  }
  if (current.empty()) {
    throw std::invalid_argument("pose keypoint lists must be non-empty");
  }
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("fluctuation sensitivity must be > 0");
  }
  double deviation = 0.0;
  for (std::size_t n = 0; n < current.size(); ++n) {
    deviation += (current[n] - previous[n]).norm();
  }
  if (deviation == 0.0) {
    return 1.0;
  }
  const double ratio = sensitivity * static_cast<double>(current.size()) / deviation;
  return saturate(ratio, 0.0, 1.0);
}

void ConfidenceScript::validate() const {
  long prev_end = 0;
  bool first = true;
  for (const ScriptEntry& e : entries) {
    if (e.first_step > e.last_step) {
      throw std::invalid_argument("script entry range must satisfy first_step <= last_step");
    }
    if (!first && e.first_step <= prev_end) {
      throw std::invalid_argument("script entries must be ascending and non-overlapping");
    }
    for (double c : {e.values.c_sm, e.values.c_eye, e.values.c_fluc}) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw std::invalid_argument("script confidences must be in [0,1]");
      }
    }
    prev_end = e.last_step;
    first = false;
  }
}

std::optional<Confidences> ConfidenceScript::at(long step) const {
  for (const ScriptEntry& e : entries) {
    if (step >= e.first_step && step <= e.last_step) {
      return e.values;
    }
  }
  return std::nullopt;
}

std::optional<Confidences> scripted_confidences(const ConfidenceScript& script, long step) {
  return script.at(step);
}

}  // namespace trustnav
