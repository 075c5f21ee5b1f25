#include "homecore/camera.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "homecore/error.hpp"

namespace homecore::cam {

using nlohmann::json;

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    raise(ErrorCode::validation_error, "focal lengths must be positive");
  if (width < 1 || height < 1)
    raise(ErrorCode::validation_error, "image dimensions must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    raise(ErrorCode::validation_error, "principal point must lie inside the image");
}

CameraIntrinsics load_intrinsics(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, std::string("intrinsics JSON: ") + e.what());
  }
  CameraIntrinsics k;
  for (const char* key : {"fx", "fy", "cx", "cy", "width", "height"})
    if (!root.contains(key) || !root[key].is_number())
      raise(ErrorCode::parse_error,
            std::string("intrinsics JSON: missing numeric field '") + key + "'");
  k.fx = root["fx"].get<double>();
  k.fy = root["fy"].get<double>();
  k.cx = root["cx"].get<double>();
  k.cy = root["cy"].get<double>();
  k.width = root["width"].get<int>();
  k.height = root["height"].get<int>();
  k.validate();
  return k;
}

CameraIntrinsics load_intrinsics_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open intrinsics file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_intrinsics(buffer.str());
}

std::string save_intrinsics(const CameraIntrinsics& k) {
  json root{{"fx", k.fx},       {"fy", k.fy},         {"cx", k.cx},
            {"cy", k.cy},       {"width", k.width},   {"height", k.height}};
  return root.dump(2) + "\n";
}

Camera look_at(const CameraIntrinsics& k, const Vec3& position, const Vec3& target,
               const Vec3& world_up) {
  k.validate();
  Camera camera;
  camera.intrinsics = k;
  camera.position = position;

  Vec3 forward = target - position;
  if (norm(forward) < 1e-12)
    raise(ErrorCode::validation_error, "camera position coincides with target");
  forward = normalized(forward);
  Vec3 right = cross(forward, world_up);
  if (norm(right) < 1e-9) right = Vec3{1.0, 0.0, 0.0};
  right = normalized(right);
  const Vec3 down = cross(forward, right);
  camera.orientation = Mat3::from_columns(right, down, forward);
  return camera;
}

Vec3 world_to_camera(const Camera& camera, const Vec3& world_point) {
  return camera.orientation.transposed_mul(world_point - camera.position);
}

std::optional<std::array<double, 2>> project(const Camera& camera, const Vec3& world_point) {
  const Vec3 p = world_to_camera(camera, world_point);
  if (p.z <= 1e-6) return std::nullopt;
  const CameraIntrinsics& k = camera.intrinsics;
  return std::array<double, 2>{k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

}  // namespace homecore::cam
