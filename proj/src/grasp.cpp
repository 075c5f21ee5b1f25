#include "homecore/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "homecore/error.hpp"

namespace homecore::grasp {

DepthImage load_depth_pgm(const std::string& path) {
  const img::Gray16 raw = img::read_pgm16(path);
  DepthImage depth;
  depth.width = raw.width;
  depth.height = raw.height;
  depth.depth.resize(raw.pixels.size());
  for (std::size_t i = 0; i < raw.pixels.size(); ++i)
    depth.depth[i] = raw.pixels[i] / 1000.0;
  return depth;
}

void save_depth_pgm(const DepthImage& depth, const std::string& path) {
  img::Gray16 raw;
  raw.width = depth.width;
  raw.height = depth.height;
  raw.pixels.resize(depth.depth.size());
  for (std::size_t i = 0; i < depth.depth.size(); ++i) {
    const double mm = std::clamp(std::round(depth.depth[i] * 1000.0), 0.0, 65535.0);
    raw.pixels[i] = static_cast<std::uint16_t>(mm);
  }
  img::write_pgm16(path, raw);
}

ObjectMask load_mask_pgm(const std::string& path) {
  const img::Gray8 raw = img::read_pgm8(path);
  ObjectMask mask;
  mask.width = raw.width;
  mask.height = raw.height;
  mask.bits.resize(raw.pixels.size());
  for (std::size_t i = 0; i < raw.pixels.size(); ++i) mask.bits[i] = raw.pixels[i] ? 1 : 0;
  return mask;
}

void save_mask_pgm(const ObjectMask& mask, const std::string& path) {
  img::Gray8 raw;
  raw.width = mask.width;
  raw.height = mask.height;
  raw.pixels.resize(mask.bits.size());
  for (std::size_t i = 0; i < mask.bits.size(); ++i) raw.pixels[i] = mask.bits[i] ? 255 : 0;
  img::write_pgm8(path, raw);
}

bool OrientedBBox3::contains(const Vec3& p, double inflation) const {
  const Vec3 rel = p - box_center;
  for (int i = 0; i < 3; ++i)
    if (std::abs(dot(rel, axes[i])) > extents[i] / 2.0 + inflation) return false;
  return true;
}

const char* approach_name(Approach a) { return a == Approach::Top ? "top" : "front"; }

cloud::PointCloud deproject(const DepthImage& depth, const ObjectMask& mask,
                            const cam::CameraIntrinsics& k) {
  k.validate();
  if (depth.width != k.width || depth.height != k.height)
    raise(ErrorCode::dimension_mismatch, "depth image does not match intrinsics dimensions");
  if (mask.width != depth.width || mask.height != depth.height)
    raise(ErrorCode::dimension_mismatch, "mask does not match depth image dimensions");

  cloud::PointCloud out;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      if (!mask.at(u, v)) continue;
      const double d = depth.at(u, v);
      if (d <= 0.0) continue;
      out.points.push_back({(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d});
    }
  }
  if (out.empty())
    raise(ErrorCode::empty_cloud, "mask covers no valid depth pixels");
  return out;
}

std::size_t closest_object(const std::vector<cloud::PointCloud>& clouds) {
  if (clouds.empty()) raise(ErrorCode::empty_input, "no clouds to choose from");
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    if (clouds[i].empty())
      raise(ErrorCode::empty_cloud, "cloud " + std::to_string(i) + " is empty");
    const double dist = norm(clouds[i].centroid());
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

OrientedBBox3 pca_bbox(const cloud::PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 4)
    raise(ErrorCode::degenerate_cloud,
          "need at least 4 points, got " + std::to_string(n));

  const Vec3 c = cloud.centroid();
  double cov[3][3] = {};
  for (const Vec3& p : cloud.points) {
    const Vec3 r = p - c;
    const double v[3] = {r.x, r.y, r.z};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) cov[i][j] += v[i] * v[j];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      cov[i][j] /= static_cast<double>(n);
      cov[j][i] = cov[i][j];
    }

  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.m[i][j] = cov[i][j];
  std::array<double, 3> eigenvalues;
  std::array<Vec3, 3> axes;
  jacobi_eigen_sym3(m, eigenvalues, axes);

  const double lead = std::max(eigenvalues[0], 0.0);
  int rank = 0;
  for (double v : eigenvalues)
    if (v > 1e-9 * lead) ++rank;
  if (lead <= 0.0 || rank < 2)
    raise(ErrorCode::degenerate_cloud, "point cloud covariance has rank < 2");
  std::array<double, 3> lo{}, hi{};
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::numeric_limits<double>::infinity();
    hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const Vec3& p : cloud.points) {
    const Vec3 r = p - c;
    for (int i = 0; i < 3; ++i) {
      const double t = dot(r, axes[i]);
      lo[i] = std::min(lo[i], t);
      hi[i] = std::max(hi[i], t);
    }
  }

  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return hi[a] - lo[a] > hi[b] - lo[b]; });

  OrientedBBox3 box;
  box.center = c;
  for (int i = 0; i < 3; ++i) {
    box.axes[i] = axes[order[i]];
    box.extents[i] = hi[order[i]] - lo[order[i]];
  }

  // Deterministic orientation: dominant component positive on the first two
  // axes, third axis completes a right-handed frame.
  std::array<double, 3> blo{}, bhi{};
  for (int i = 0; i < 2; ++i) {
    const Vec3& a = box.axes[i];
    const double comps[3] = {a.x, a.y, a.z};
    int dominant = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(comps[j]) > std::abs(comps[dominant])) dominant = j;
    blo[i] = lo[order[i]];
    bhi[i] = hi[order[i]];
    if (comps[dominant] < 0.0) {
      box.axes[i] = box.axes[i] * -1.0;
      blo[i] = -hi[order[i]];
      bhi[i] = -lo[order[i]];
    }
  }
  box.axes[2] = cross(box.axes[0], box.axes[1]);
  blo[2] = std::numeric_limits<double>::infinity();
  bhi[2] = -std::numeric_limits<double>::infinity();
  for (const Vec3& p : cloud.points) {
    const double t = dot(p - c, box.axes[2]);
    blo[2] = std::min(blo[2], t);
    bhi[2] = std::max(bhi[2], t);
  }
  box.extents[2] = bhi[2] - blo[2];

  box.box_center = box.center;
  for (int i = 0; i < 3; ++i)
    box.box_center = box.box_center + box.axes[i] * ((blo[i] + bhi[i]) / 2.0);
  return box;
}

double bbox_vertical_extent(const OrientedBBox3& bbox) {
  double h = 0.0;
  for (int i = 0; i < 3; ++i) h += bbox.extents[i] * std::abs(bbox.axes[i].y);
  return h;
}

double bbox_footprint_extent(const OrientedBBox3& bbox) {
  double w = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double horiz = std::sqrt(std::max(0.0, 1.0 - bbox.axes[i].y * bbox.axes[i].y));
    w = std::max(w, bbox.extents[i] * horiz);
  }
  return w;
}

GraspPose decide_grasp(const OrientedBBox3& bbox) {
  const double h = bbox_vertical_extent(bbox);

  int widest = 0;
  double w = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double horiz =
        bbox.extents[i] * std::sqrt(std::max(0.0, 1.0 - bbox.axes[i].y * bbox.axes[i].y));
    if (horiz > w + 1e-15) {
      w = horiz;
      widest = i;
    }
  }

  GraspPose pose;
  if (w - h >= -1e-9) {
    pose.approach = Approach::Top;
    // Directly above the centroid, at the top of the box (-y is up).
    pose.position = {bbox.center.x, bbox.box_center.y - h / 2.0, bbox.center.z};
    pose.pitch = -std::numbers::pi / 2.0;
    const Vec3& a = bbox.axes[widest];
    double yaw = std::atan2(a.x, a.z);
    // Grasp axes are sign-symmetric; canonicalize to (-pi/2, pi/2].
    if (yaw > std::numbers::pi / 2.0) yaw -= std::numbers::pi;
    if (yaw <= -std::numbers::pi / 2.0) yaw += std::numbers::pi;
    pose.yaw = yaw;
  } else {
    pose.approach = Approach::Front;
    // On the widest horizontal principal axis, on the camera-facing side.
    const Vec3 offset = bbox.axes[widest] * (bbox.extents[widest] / 2.0);
    const Vec3 face_a = bbox.center - offset;
    const Vec3 face_b = bbox.center + offset;
    pose.position = norm(face_a) <= norm(face_b) ? face_a : face_b;
    pose.pitch = 0.0;
    const Vec3 dir = bbox.center - pose.position;
    pose.yaw = (std::abs(dir.x) + std::abs(dir.z) < 1e-12) ? 0.0 : std::atan2(dir.x, dir.z);
  }
  return pose;
}

GraspEstimate estimate_grasp(const DepthImage& depth, const std::vector<ObjectMask>& masks,
                             const cam::CameraIntrinsics& k) {
  if (masks.empty()) raise(ErrorCode::empty_input, "no masks given");

  std::vector<cloud::PointCloud> clouds;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    try {
      clouds.push_back(deproject(depth, masks[i], k));
      source.push_back(i);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::empty_cloud) throw;
    }
  }
  if (clouds.empty())
    raise(ErrorCode::empty_cloud,
          "all " + std::to_string(masks.size()) + " masks produced empty clouds");

  const std::size_t pick = closest_object(clouds);
  GraspEstimate estimate;
  estimate.mask_index = source[pick];
  try {
    estimate.bbox = pca_bbox(clouds[pick]);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_cloud)
      raise(ErrorCode::degenerate_cloud,
            "mask " + std::to_string(source[pick]) + ": " + e.what());
    throw;
  }
  estimate.pose = decide_grasp(estimate.bbox);
  return estimate;
}

}  // namespace homecore::grasp
