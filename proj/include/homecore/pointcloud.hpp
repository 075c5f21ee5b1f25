#pragma once

#include <string>
#include <vector>

#include "homecore/linalg.hpp"

namespace homecore::cloud {

struct PointCloud {
  std::vector<Vec3> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  Vec3 centroid() const;
};

// ASCII PLY with float x/y/z vertex properties only.
PointCloud read_ply(const std::string& path);
void write_ply(const PointCloud& cloud, const std::string& path);

}  // namespace homecore::cloud
