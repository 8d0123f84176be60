#pragma once

#include <span>

#include "arshoe/pnp.hpp"

namespace arshoe {

/// Mean over consecutive frames of the mean L2 displacement of the model
/// keypoints reprojected under pose[l] and pose[l-1], in pixels per frame.
/// Throws Errc::insufficient_data for fewer than two poses.
double jitter_metric(std::span<const Pose> poses, const FootModel& model, const Intrinsics& k);

}  // namespace arshoe
