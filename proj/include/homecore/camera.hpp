#pragma once

#include <array>
#include <optional>
#include <string>

#include "homecore/linalg.hpp"

namespace homecore::cam {

// Pinhole model. Camera frame: x right, y down, z forward (optical axis).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
};

CameraIntrinsics load_intrinsics(const std::string& json_text);
CameraIntrinsics load_intrinsics_file(const std::string& path);
std::string save_intrinsics(const CameraIntrinsics& k);

// Extrinsic pose: `orientation` columns are the camera axes expressed in
// world coordinates, so p_cam = orientation^T * (p_world - position).
struct Camera {
  CameraIntrinsics intrinsics;
  Vec3 position{0.0, 0.0, 0.0};
  Mat3 orientation = Mat3::identity();
};

// Builds a pose at `position` with the optical axis through `target`.
// `world_up` resolves the roll; a fallback right axis is used when the
// optical axis is (anti)parallel to it.
Camera look_at(const CameraIntrinsics& k, const Vec3& position, const Vec3& target,
               const Vec3& world_up = {0.0, 0.0, 1.0});

// Pixel coordinates of a world point, or nullopt when the point lies at or
// behind the image plane (z_cam <= 1e-6).
std::optional<std::array<double, 2>> project(const Camera& camera, const Vec3& world_point);

// Camera-frame coordinates of a world point.
Vec3 world_to_camera(const Camera& camera, const Vec3& world_point);

}  // namespace homecore::cam
