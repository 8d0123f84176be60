#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "arshoe/geom.hpp"
#include "arshoe/keypoints.hpp"

namespace arshoe {

/// Canonical foot geometry in the model frame (meters): x heel->toe, y to
/// the foot's left, z up, origin at mid-foot on the sole plane.
struct FootModel {
  std::array<Vec3, kNumKeypoints> keypoints3d{};
  PointCloud cloud;
  /// 3-D ring bounding the shoe opening, ordered around the ankle.
  std::vector<Vec3> opening;
  double scale_length = 0.26;

  /// Throws Errc::invalid_geometry for an empty cloud or (near-)coplanar
  /// keypoints.
  void validate() const;
};

/// The shipped analytic model: 26 cm heel-to-toe, hand-placed keypoints.
FootModel default_foot_model();

/// Text format: "footmodel v1", then "<keypoints> <cloud>", then one
/// "x y z" line per point, keypoints first. Opening ring points, when
/// present, follow the cloud after an "opening <n>" line.
FootModel read_foot_model(const std::filesystem::path& path);
void write_foot_model(const std::filesystem::path& path, const FootModel& model);

struct Correspondence {
  Vec2 pixel;
  Vec3 model;
};

struct LmOptions {
  int max_iterations = 50;
  double gradient_tolerance = 1e-10;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
};

struct PnpResult {
  Pose pose;
  double residual_px = 0.0;  ///< mean Euclidean reprojection error
  int iterations = 0;
};

/// Raised when refinement never improves on its starting point.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, PnpResult best)
      : Error(Errc::non_convergence, what), best_(best) {}
  const PnpResult& best_so_far() const { return best_; }

 private:
  PnpResult best_;
};

/// DLT initialisation on normalised coordinates, then Levenberg-Marquardt
/// over a left-multiplied rotation increment and the translation. A second
/// run starts from the pose with the point plane tilted the other way about
/// the line of sight; the lower cost wins.
/// Needs >= 6 non-coplanar correspondences (Errc::insufficient_data).
PnpResult solve_pnp(std::span<const Correspondence> correspondences, const Intrinsics& k,
                    const LmOptions& options = {});

/// Only the linear DLT estimate (orthonormalised rotation).
Pose dlt_pose(std::span<const Correspondence> correspondences, const Intrinsics& k);

double mean_reprojection_error(std::span<const Correspondence> correspondences, const Pose& pose,
                               const Intrinsics& k);

std::array<Vec2, kNumKeypoints> project_model_keypoints(const FootModel& model, const Pose& pose,
                                                        const Intrinsics& k);

/// Correspondences for the present keypoints of an instance given in image
/// pixels.
std::vector<Correspondence> correspondences_for(const FootInstance& instance, const FootModel& model);

/// Intrinsic X-Y-Z Euler angles (radians) with R = Rx(a) Ry(b) Rz(c).
Vec3 euler_xyz(const Mat3& r);
Mat3 rotation_from_euler_xyz(const Vec3& angles);

struct PoseError {
  double euler_deg = 0.0;       ///< mean |angle| of the relative rotation
  double translation_cm = 0.0;  ///< Euclidean distance x 100
};

/// Relative rotation R_est^T R_true decomposed as intrinsic XYZ.
PoseError pose_error(const Pose& estimate, const Pose& truth);

}  // namespace arshoe
