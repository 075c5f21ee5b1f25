#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "homecore/camera.hpp"
#include "homecore/image.hpp"
#include "homecore/linalg.hpp"
#include "homecore/pointcloud.hpp"

namespace homecore::grasp {

// Depth in meters, 0 = invalid reading. Camera frame: x right, y down,
// z forward, so "up" is -y.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
};

struct ObjectMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int u, int v) const { return bits[static_cast<std::size_t>(v) * width + u] != 0; }
};

// 16-bit PGM, millimeters per pixel.
DepthImage load_depth_pgm(const std::string& path);
void save_depth_pgm(const DepthImage& depth, const std::string& path);
// 8-bit PGM, nonzero = masked.
ObjectMask load_mask_pgm(const std::string& path);
void save_mask_pgm(const ObjectMask& mask, const std::string& path);

struct OrientedBBox3 {
  Vec3 center{0.0, 0.0, 0.0};             // point centroid
  std::array<Vec3, 3> axes;               // orthonormal, right-handed
  std::array<double, 3> extents{0, 0, 0}; // full side lengths, descending
  Vec3 box_center{0.0, 0.0, 0.0};         // geometric center of the extent box

  bool contains(const Vec3& p, double inflation = 0.0) const;
};

enum class Approach { Top, Front };

const char* approach_name(Approach a);

struct GraspPose {
  Vec3 position{0.0, 0.0, 0.0};
  double yaw = 0.0;
  double pitch = 0.0;
  Approach approach = Approach::Top;
};

struct GraspEstimate {
  GraspPose pose;
  OrientedBBox3 bbox;
  std::size_t mask_index = 0;
};

cloud::PointCloud deproject(const DepthImage& depth, const ObjectMask& mask,
                            const cam::CameraIntrinsics& k);

std::size_t closest_object(const std::vector<cloud::PointCloud>& clouds);

OrientedBBox3 pca_bbox(const cloud::PointCloud& cloud);

GraspPose decide_grasp(const OrientedBBox3& bbox);

GraspEstimate estimate_grasp(const DepthImage& depth, const std::vector<ObjectMask>& masks,
                             const cam::CameraIntrinsics& k);

// Footprint/height split used by the approach rule: vertical extent is the
// box's support along -y, footprint is the largest horizontal axis span.
double bbox_vertical_extent(const OrientedBBox3& bbox);
double bbox_footprint_extent(const OrientedBBox3& bbox);

}  // namespace homecore::grasp
