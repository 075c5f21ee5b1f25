#include "homecore/pointcloud.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "homecore/error.hpp"

namespace homecore::cloud {

Vec3 PointCloud::centroid() const {
  if (points.empty()) raise(ErrorCode::empty_cloud, "centroid of empty cloud");
  Vec3 sum{0.0, 0.0, 0.0};
  for (const Vec3& p : points) sum = sum + p;
  return sum * (1.0 / static_cast<double>(points.size()));
}

PointCloud read_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open cloud file " + path);

  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply")
    raise(ErrorCode::parse_error, path + ": not a PLY file");

  std::size_t vertex_count = 0;
  bool ascii = false;
  bool have_count = false;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::string word;
    tokens >> word;
    if (word == "format") {
      std::string fmt;
      tokens >> fmt;
      ascii = (fmt == "ascii");
    } else if (word == "element") {
      std::string what;
      tokens >> what >> vertex_count;
      if (what != "vertex")
        raise(ErrorCode::parse_error, path + ": unsupported PLY element '" + what + "'");
      have_count = true;
    } else if (word == "end_header") {
      break;
    }
  }
  if (!ascii) raise(ErrorCode::parse_error, path + ": only ASCII PLY supported");
  if (!have_count) raise(ErrorCode::parse_error, path + ": missing vertex element");

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    Vec3 p;
    if (!(in >> p.x >> p.y >> p.z))
      raise(ErrorCode::parse_error, path + ": truncated vertex list");
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_error, "cannot write cloud file " + path);
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  out.precision(9);
  for (const Vec3& p : cloud.points) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  if (!out) raise(ErrorCode::io_error, "failed writing cloud file " + path);
}

}  // namespace homecore::cloud
