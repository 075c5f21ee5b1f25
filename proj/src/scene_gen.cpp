#include "homecore/scene_gen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "homecore/error.hpp"
#include "homecore/rng.hpp"

namespace homecore::scene {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool model_spans_3d(const std::vector<Vec3>& vertices) {
  if (vertices.size() < 4) return false;
  Vec3 mean{0, 0, 0};
  for (const Vec3& v : vertices) mean = mean + v;
  mean = mean * (1.0 / static_cast<double>(vertices.size()));
  Mat3 cov;
  for (const Vec3& v : vertices) {
    const Vec3 r = v - mean;
    const double c[3] = {r.x, r.y, r.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov.m[i][j] += c[i] * c[j];
  }
  std::array<double, 3> eigenvalues;
  std::array<Vec3, 3> eigenvectors;
  jacobi_eigen_sym3(cov, eigenvalues, eigenvectors);
  return eigenvalues[2] > 1e-12 * std::max(eigenvalues[0], 1e-300);
}

Range parse_range(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    raise(ErrorCode::parse_error, context + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void SceneConfig::validate() const {
  if (!(extent_x > 0.0) || !(extent_y > 0.0))
    raise(ErrorCode::invalid_config, "room extents must be positive");
  if (catalog.empty()) raise(ErrorCode::invalid_config, "catalog must not be empty");
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (!model_spans_3d(catalog[i].vertices))
      raise(ErrorCode::invalid_config,
            "catalog entry '" + catalog[i].class_name + "' needs >= 4 non-coplanar vertices");
    for (std::size_t j = i + 1; j < catalog.size(); ++j)
      if (catalog[i].class_id == catalog[j].class_id)
        raise(ErrorCode::invalid_config,
              "duplicate class_id " + std::to_string(catalog[i].class_id));
  }
  if (objects_min < 0 || objects_max < objects_min)
    raise(ErrorCode::invalid_config, "objects_per_scene range must satisfy 0 <= min <= max");
  if (min_spacing < 0.0) raise(ErrorCode::invalid_config, "min_spacing must be >= 0");
  if (!(camera_distance.lo > 0.0) || camera_distance.hi < camera_distance.lo)
    raise(ErrorCode::invalid_config, "camera distance range must be positive and ordered");
  if (camera_height.hi < camera_height.lo)
    raise(ErrorCode::invalid_config, "camera height range must be ordered");
  if (camera_pitch_jitter < 0.0)
    raise(ErrorCode::invalid_config, "camera pitch_jitter must be >= 0");
  if (light_intensity.hi < light_intensity.lo || light_elevation.hi < light_elevation.lo)
    raise(ErrorCode::invalid_config, "light ranges must be ordered");
  if (backgrounds.empty()) raise(ErrorCode::invalid_config, "backgrounds must not be empty");
  image.validate();
  if (!(visibility_threshold >= 0.0 && visibility_threshold <= 1.0))
    raise(ErrorCode::invalid_config, "visibility_threshold must be in [0, 1]");
}

SceneConfig load_scene_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, std::string("scene config JSON: ") + e.what());
  }

  SceneConfig config;
  try {
    const json& room = root.at("room");
    config.extent_x = room.at("extent_x").get<double>();
    config.extent_y = room.at("extent_y").get<double>();

    for (const json& entry : root.at("catalog")) {
      ObjectModel model;
      model.class_id = entry.at("class_id").get<int>();
      model.class_name = entry.value("class_name", "class_" + std::to_string(model.class_id));
      for (const json& v : entry.at("vertices")) {
        if (!v.is_array() || v.size() != 3)
          raise(ErrorCode::parse_error, "scene config: vertices must be [x,y,z]");
        model.vertices.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
      }
      config.catalog.push_back(std::move(model));
    }

    const json& per_scene = root.at("objects_per_scene");
    if (!per_scene.is_array() || per_scene.size() != 2)
      raise(ErrorCode::parse_error, "scene config: objects_per_scene must be [min, max]");
    config.objects_min = per_scene[0].get<int>();
    config.objects_max = per_scene[1].get<int>();
    config.min_spacing = root.value("min_spacing", 0.0);

    const json& camera = root.at("camera");
    config.camera_distance = parse_range(camera.at("distance"), "camera.distance");
    config.camera_height = parse_range(camera.at("height"), "camera.height");
    config.camera_pitch_jitter = camera.value("pitch_jitter", 0.0);

    const json& light = root.at("light");
    config.light_intensity = parse_range(light.at("intensity"), "light.intensity");
    config.light_elevation = parse_range(light.at("elevation"), "light.elevation");

    config.backgrounds = root.at("backgrounds").get<std::vector<int>>();

    const json& image = root.at("image");
    config.image.fx = image.at("fx").get<double>();
    config.image.fy = image.at("fy").get<double>();
    config.image.cx = image.at("cx").get<double>();
    config.image.cy = image.at("cy").get<double>();
    config.image.width = image.at("width").get<int>();
    config.image.height = image.at("height").get<int>();

    config.visibility_threshold = root.value("visibility_threshold", 0.25);
    config.seed = root.value("seed", 0ULL);
  } catch (const json::exception& e) {
    raise(ErrorCode::parse_error, std::string("scene config JSON: ") + e.what());
  }

  config.validate();
  return config;
}

SceneConfig load_scene_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open scene config " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scene_config(buffer.str());
}

std::vector<Vec3> world_vertices(const SceneConfig& config, const ScenePose& pose) {
  const ObjectModel& model = config.catalog[static_cast<std::size_t>(pose.catalog_index)];
  const Mat3 rot = rotation_z(pose.yaw);
  std::vector<Vec3> out;
  out.reserve(model.vertices.size());
  for (const Vec3& v : model.vertices) out.push_back(rot * v + pose.position);
  return out;
}

SceneSample sample_scene(const SceneConfig& config, int index) {
  config.validate();
  if (index < 0) raise(ErrorCode::validation_error, "scene index must be nonnegative");

  SceneSample sample;
  sample.index = index;
  sample.sample_seed = mix_seed(config.seed, static_cast<std::uint64_t>(index));
  Rng rng(sample.sample_seed);

  const int requested = rng.uniform_int(config.objects_min, config.objects_max);
  for (int slot = 0; slot < requested; ++slot) {
    ScenePose pose;
    pose.catalog_index = rng.uniform_int(0, static_cast<int>(config.catalog.size()) - 1);
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const Vec3 candidate{rng.uniform(0.0, config.extent_x),
                           rng.uniform(0.0, config.extent_y), 0.0};
      placed = true;
      for (const ScenePose& other : sample.poses) {
        const double dx = candidate.x - other.position.x;
        const double dy = candidate.y - other.position.y;
        if (std::sqrt(dx * dx + dy * dy) < config.min_spacing) {
          placed = false;
          break;
        }
      }
      if (placed) pose.position = candidate;
    }
    pose.yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (placed) sample.poses.push_back(pose);
  }
  if (static_cast<int>(sample.poses.size()) < config.objects_min)
    raise(ErrorCode::infeasible_config,
          "could not place the minimum object count at spacing " +
              std::to_string(config.min_spacing));

  Vec3 target{config.extent_x / 2.0, config.extent_y / 2.0, 0.0};
  if (!sample.poses.empty()) {
    Vec3 sum{0, 0, 0};
    for (const ScenePose& pose : sample.poses) sum = sum + pose.position;
    target = sum * (1.0 / static_cast<double>(sample.poses.size()));
  }

  const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double distance = rng.uniform(config.camera_distance.lo, config.camera_distance.hi);
  const double height = rng.uniform(config.camera_height.lo, config.camera_height.hi);
  const Vec3 position{target.x + distance * std::cos(azimuth),
                      target.y + distance * std::sin(azimuth), height};
  sample.camera = cam::look_at(config.image, position, target);
  if (config.camera_pitch_jitter > 0.0) {
    const double pitch =
        rng.uniform(-config.camera_pitch_jitter, config.camera_pitch_jitter);
    const Vec3 right = sample.camera.orientation.col(0);
    sample.camera.orientation = rotation_about_axis(right, pitch) * sample.camera.orientation;
  }

  sample.light.intensity = rng.uniform(config.light_intensity.lo, config.light_intensity.hi);
  sample.light.elevation = rng.uniform(config.light_elevation.lo, config.light_elevation.hi);
  sample.light.azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
  sample.background_id =
      config.backgrounds[static_cast<std::size_t>(rng.uniform_int(
          0, static_cast<int>(config.backgrounds.size()) - 1))];
  return sample;
}

namespace {

struct Px {
  double u, v;
};

double hull_cross(const Px& o, const Px& a, const Px& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

// Monotone-chain convex hull, CCW in pixel coordinates.
std::vector<Px> convex_hull(std::vector<Px> pts) {
  std::sort(pts.begin(), pts.end(), [](const Px& a, const Px& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Px& a, const Px& b) { return a.u == b.u && a.v == b.v; }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Px> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && hull_cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i > 0; --i) {
    while (k >= lower && hull_cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0.0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

bool hull_contains(const std::vector<Px>& hull, const Px& p) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Px& a = hull[i];
    const Px& b = hull[(i + 1) % hull.size()];
    if (hull_cross(a, b, p) < -1e-9) return false;
  }
  return true;
}

struct ProjectedObject {
  int class_id = 0;
  std::size_t total_vertices = 0;
  std::vector<Px> front;          // projected pixels of front-of-camera vertices
  std::vector<double> depths;     // camera-frame z per front vertex
  std::vector<Px> hull;
  double mean_depth = 0.0;
};

std::vector<ProjectedObject> project_objects(const SceneConfig& config,
                                             const SceneSample& sample) {
  std::vector<ProjectedObject> out;
  out.reserve(sample.poses.size());
  for (const ScenePose& pose : sample.poses) {
    ProjectedObject po;
    po.class_id = config.catalog[static_cast<std::size_t>(pose.catalog_index)].class_id;
    const std::vector<Vec3> verts = world_vertices(config, pose);
    po.total_vertices = verts.size();
    for (const Vec3& v : verts) {
      const Vec3 pc = cam::world_to_camera(sample.camera, v);
      if (pc.z <= 1e-6) continue;
      const auto px = cam::project(sample.camera, v);
      po.front.push_back({(*px)[0], (*px)[1]});
      po.depths.push_back(pc.z);
    }
    if (!po.front.empty()) {
      po.hull = convex_hull(po.front);
      for (double d : po.depths) po.mean_depth += d;
      po.mean_depth /= static_cast<double>(po.depths.size());
    }
    out.push_back(std::move(po));
  }
  return out;
}

}  // namespace

std::vector<Annotation> annotate(const SceneConfig& config, const SceneSample& sample) {
  const std::vector<ProjectedObject> objects = project_objects(config, sample);
  const double width = config.image.width;
  const double height = config.image.height;

  std::vector<Annotation> annotations;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ProjectedObject& obj = objects[i];
    if (obj.front.empty()) continue;

    std::size_t visible = 0;
    for (std::size_t v = 0; v < obj.front.size(); ++v) {
      const Px& p = obj.front[v];
      if (p.u < 0.0 || p.u >= width || p.v < 0.0 || p.v >= height) continue;
      bool occluded = false;
      for (std::size_t j = 0; j < objects.size() && !occluded; ++j) {
        if (j == i || objects[j].hull.size() < 3) continue;
        occluded = objects[j].mean_depth < obj.depths[v] && hull_contains(objects[j].hull, p);
      }
      if (!occluded) ++visible;
    }
    if (static_cast<double>(visible) <
        config.visibility_threshold * static_cast<double>(obj.total_vertices))
      continue;

    double min_u = obj.front[0].u, max_u = obj.front[0].u;
    double min_v = obj.front[0].v, max_v = obj.front[0].v;
    for (const Px& p : obj.front) {
      min_u = std::min(min_u, p.u);
      max_u = std::max(max_u, p.u);
      min_v = std::min(min_v, p.v);
      max_v = std::max(max_v, p.v);
    }
    min_u = std::clamp(min_u, 0.0, width);
    max_u = std::clamp(max_u, 0.0, width);
    min_v = std::clamp(min_v, 0.0, height);
    max_v = std::clamp(max_v, 0.0, height);
    if (max_u - min_u <= 0.0 || max_v - min_v <= 0.0) continue;

    Annotation a;
    a.class_id = obj.class_id;
    a.cx = (min_u + max_u) / 2.0 / width;
    a.cy = (min_v + max_v) / 2.0 / height;
    a.w = (max_u - min_u) / width;
    a.h = (max_v - min_v) / height;
    annotations.push_back(a);
  }
  return annotations;
}

namespace {

img::Rgb palette_color(std::uint64_t key, std::uint64_t salt, int floor_value) {
  const std::uint64_t h = mix_seed(key, salt);
  const int span = 256 - floor_value;
  return {static_cast<std::uint8_t>(floor_value + static_cast<int>(h % span)),
          static_cast<std::uint8_t>(floor_value + static_cast<int>((h >> 16) % span)),
          static_cast<std::uint8_t>(floor_value + static_cast<int>((h >> 32) % span))};
}

}  // namespace

img::RgbImage render_preview(const SceneConfig& config, const SceneSample& sample) {
  const img::Rgb background =
      palette_color(static_cast<std::uint64_t>(sample.background_id), 0xb6, 160);
  img::RgbImage image(config.image.width, config.image.height, background);

  std::vector<ProjectedObject> objects = project_objects(config, sample);
  std::vector<std::size_t> order(objects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return objects[a].mean_depth > objects[b].mean_depth;  // far first
  });

  for (std::size_t idx : order) {
    const ProjectedObject& obj = objects[idx];
    if (obj.hull.size() < 3) continue;
    const img::Rgb color =
        palette_color(static_cast<std::uint64_t>(obj.class_id), 0xc1a55, 0);

    double min_u = obj.hull[0].u, max_u = obj.hull[0].u;
    double min_v = obj.hull[0].v, max_v = obj.hull[0].v;
    for (const Px& p : obj.hull) {
      min_u = std::min(min_u, p.u);
      max_u = std::max(max_u, p.u);
      min_v = std::min(min_v, p.v);
      max_v = std::max(max_v, p.v);
    }
    const int px0 = std::max(0, static_cast<int>(std::floor(min_u)));
    const int px1 = std::min(config.image.width - 1, static_cast<int>(std::ceil(max_u)));
    const int py0 = std::max(0, static_cast<int>(std::floor(min_v)));
    const int py1 = std::min(config.image.height - 1, static_cast<int>(std::ceil(max_v)));
    for (int py = py0; py <= py1; ++py)
      for (int px = px0; px <= px1; ++px)
        if (hull_contains(obj.hull, {px + 0.5, py + 0.5})) image.at(px, py) = color;
  }
  return image;
}

std::string format_labels(const std::vector<Annotation>& annotations) {
  std::string out;
  char line[128];
  for (const Annotation& a : annotations) {
    std::snprintf(line, sizeof line, "%d %.6f %.6f %.6f %.6f\n", a.class_id, a.cx, a.cy,
                  a.w, a.h);
    out += line;
  }
  return out;
}

namespace {

std::string sample_stem(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", index);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io_error, "cannot write " + path.string());
  out << content;
  if (!out) raise(ErrorCode::io_error, "failed writing " + path.string());
}

void generate_one(const SceneConfig& config, int index, const fs::path& out_dir,
                  bool previews) {
  const std::string stem = sample_stem(index);
  const fs::path label_path = out_dir / "labels" / (stem + ".txt");
  const fs::path preview_path = out_dir / "previews" / (stem + ".ppm");
  const bool label_done = fs::exists(label_path);
  const bool preview_done = !previews || fs::exists(preview_path);
  if (label_done && preview_done) return;

  SceneSample sample = sample_scene(config, index);
  sample.annotations = annotate(config, sample);
  // The label file marks the sample complete, so it is written last.
  if (previews) {
    std::string ppm = img::encode_ppm(render_preview(config, sample));
    write_text_file(preview_path, ppm);
  }
  write_text_file(label_path, format_labels(sample.annotations));
}

}  // namespace

DatasetManifest generate_dataset(const SceneConfig& config, int count,
                                 const std::string& out_dir, bool previews, int jobs) {
  config.validate();
  if (count < 0) raise(ErrorCode::validation_error, "sample count must be nonnegative");
  if (jobs < 1) raise(ErrorCode::validation_error, "jobs must be >= 1");

  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root / "labels", ec);
  if (ec) raise(ErrorCode::io_error, "cannot create " + (root / "labels").string());
  if (previews) {
    fs::create_directories(root / "previews", ec);
    if (ec) raise(ErrorCode::io_error, "cannot create " + (root / "previews").string());
  }

  if (jobs == 1) {
    for (int i = 0; i < count; ++i) generate_one(config, i, root, previews);
  } else {
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          generate_one(config, i, root, previews);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, count > 0 ? count : 1); ++t)
      pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  json manifest;
  manifest["count"] = count;
  manifest["seed"] = config.seed;
  manifest["samples"] = json::array();
  for (int i = 0; i < count; ++i) {
    json entry{{"index", i},
               {"seed", mix_seed(config.seed, static_cast<std::uint64_t>(i))},
               {"labels", "labels/" + sample_stem(i) + ".txt"}};
    if (previews) entry["preview"] = "previews/" + sample_stem(i) + ".ppm";
    manifest["samples"].push_back(std::move(entry));
  }

  DatasetManifest result;
  result.count = count;
  result.seed = config.seed;
  result.json = manifest.dump() + "\n";
  write_text_file(root / "manifest.json", result.json);
  return result;
}

}  // namespace homecore::scene
