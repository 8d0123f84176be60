#include "arshoe/metrics.hpp"

namespace arshoe {

double jitter_metric(std::span<const Pose> poses, const FootModel& model, const Intrinsics& k) {
  if (poses.size() < 2) throw Error(Errc::insufficient_data, "jitter needs at least two poses");
  auto prev = project_model_keypoints(model, poses[0], k);
  double sum = 0.0;
  for (std::size_t l = 1; l < poses.size(); ++l) {
    const auto cur = project_model_keypoints(model, poses[l], k);
    double frame = 0.0;
    for (int j = 0; j < kNumKeypoints; ++j) {
      frame += (cur[static_cast<std::size_t>(j)] - prev[static_cast<std::size_t>(j)]).norm();
    }
    sum += frame / kNumKeypoints;
    prev = cur;
  }
  return sum / static_cast<double>(poses.size() - 1);
}

}  // namespace arshoe
