#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homecore/camera.hpp"
#include "homecore/image.hpp"
#include "homecore/linalg.hpp"

namespace homecore::scene {

struct ObjectModel {
  int class_id = 0;
  std::string class_name;
  std::vector<Vec3> vertices;  // model frame, meters
};

struct ScenePose {
  int catalog_index = 0;
  Vec3 position{0.0, 0.0, 0.0};  // world frame, z up, objects on the floor
  double yaw = 0.0;
};

struct LightMeta {
  double intensity = 0.0;
  double elevation = 0.0;
  double azimuth = 0.0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SceneConfig {
  double extent_x = 0.0;
  double extent_y = 0.0;
  std::vector<ObjectModel> catalog;
  int objects_min = 0;
  int objects_max = 0;
  double min_spacing = 0.0;
  Range camera_distance;
  Range camera_height;
  double camera_pitch_jitter = 0.0;
  Range light_intensity;
  Range light_elevation;
  std::vector<int> backgrounds;
  cam::CameraIntrinsics image;
  double visibility_threshold = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Annotation {
  int class_id = 0;
  double cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;  // normalized to [0,1]
};

struct SceneSample {
  int index = 0;
  std::uint64_t sample_seed = 0;
  std::vector<ScenePose> poses;
  cam::Camera camera;
  LightMeta light;
  int background_id = 0;
  std::vector<Annotation> annotations;
};

SceneConfig load_scene_config(const std::string& json_text);
SceneConfig load_scene_config_file(const std::string& path);

// Pure function of (config.seed, index); annotations left empty.
SceneSample sample_scene(const SceneConfig& config, int index);

std::vector<Vec3> world_vertices(const SceneConfig& config, const ScenePose& pose);

std::vector<Annotation> annotate(const SceneConfig& config, const SceneSample& sample);

img::RgbImage render_preview(const SceneConfig& config, const SceneSample& sample);

std::string format_labels(const std::vector<Annotation>& annotations);

struct DatasetManifest {
  int count = 0;
  std::uint64_t seed = 0;
  std::string json;  // full manifest document
};

// Writes labels/NNNNNN.txt (and optional previews/NNNNNN.ppm) plus
// manifest.json under out_dir; skips samples whose outputs already exist.
DatasetManifest generate_dataset(const SceneConfig& config, int count,
                                 const std::string& out_dir, bool previews = false,
                                 int jobs = 1);

}  // namespace homecore::scene
