#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homecore/geometry.hpp"
#include "homecore/image.hpp"

namespace homecore::semmap {

using geom::Point2;
using geom::Polygon2;

struct Pose2 {
  Point2 position;
  double yaw = 0.0;  // radians in (-pi, pi]
};

struct Room {
  std::string name;
  Polygon2 contour;
};

struct Furniture {
  std::string name;
  std::string room;  // containing room, by name
  Polygon2 contour;
};

struct Door {
  std::string name;
  std::string room_a, room_b;  // connected rooms, distinct
  Polygon2 contour;
};

/// Named 2D contours for rooms, furniture, and doors. Immutable after load;
/// shared freely across readers.
struct SemanticMap {
  std::vector<Room> rooms;
  std::vector<Furniture> furniture;
  std::vector<Door> doors;

  const Room* find_room(const std::string& name) const;
  const Furniture* find_furniture(const std::string& name) const;
  const Door* find_door(const std::string& name) const;

  /// Throws validation_error naming the violated invariant.
  void validate() const;
};

struct OccupancyGrid {
  Point2 origin;          // world position of the grid's lower-left corner
  double resolution = 0.05;  // meters per cell
  int width = 0, height = 0;
  std::vector<std::uint8_t> cells;  // 0 free, 1 occupied; row-major from origin

  std::uint8_t at(int ix, int iy) const {
    return cells[static_cast<std::size_t>(iy) * width + ix];
  }
  Point2 cell_center(int ix, int iy) const {
    return {origin.x + (ix + 0.5) * resolution, origin.y + (iy + 0.5) * resolution};
  }
  std::size_t occupied_count() const;
};

struct LocateResult {
  std::optional<std::string> room;
  /// Set when overlapping room contours made the answer ambiguous; the
  /// smallest-area room (file order on ties) was returned.
  std::optional<std::string> diagnostic;
};

/// Room containing p, if any. Overlap tie-break: smallest area, then file order.
LocateResult locate(const SemanticMap& map, const Point2& p);

struct NavigationGoal {
  Pose2 pose;
  std::size_t edge_index = 0;   // selected contour edge of the target
  Point2 edge_midpoint;
};

/// Standoff pose near the named furniture: the goal sits on the outward
/// normal from the midpoint of a contour edge, `standoff` meters out, facing
/// the edge. Candidate edges are filtered to goals that stay inside the
/// containing room and outside every furniture contour; the longest feasible
/// edge wins, ties going to the lowest edge index.
NavigationGoal navigation_point(const SemanticMap& map, const std::string& target,
                                double standoff = 0.6);

/// Marks every cell whose center falls inside any furniture contour as
/// occupied. Monotone: already-occupied cells stay occupied.
OccupancyGrid inject_obstacles(const SemanticMap& map, OccupancyGrid grid);

/// Grid covering the map's bounding box (plus margin) at the given resolution.
OccupancyGrid make_grid(const SemanticMap& map, double resolution = 0.05,
                        double margin = 0.2);

using ColorTable = std::map<std::string, img::Rgb>;

/// Deterministic per seed; every named area (room, furniture, door) gets a
/// color, with pairwise RGB distance >= 32 enforced by re-drawing collisions.
ColorTable assign_colors(const SemanticMap& map, std::uint64_t seed);

/// Flat raster of the map with the given colors, drawn rooms -> furniture ->
/// doors. Width in pixels; height follows the map aspect ratio.
img::RgbImage render(const SemanticMap& map, const ColorTable& colors,
                     int width_px = 800);

/// SVG equivalent of render().
std::string render_svg(const SemanticMap& map, const ColorTable& colors,
                       int width_px = 800);

// JSON map file, units meters:
// {"rooms":[{"name":s,"contour":[[x,y],...]}],
//  "furniture":[{"name":s,"room":s,"contour":[[x,y],...]}],
//  "doors":[{"name":s,"rooms":[s,s],"contour":[[x,y],...]}]}
SemanticMap load_map(const std::string& json_text);
SemanticMap load_map_file(const std::string& path);
std::string save_map(const SemanticMap& map);

bool maps_equal(const SemanticMap& a, const SemanticMap& b);

}  // namespace homecore::semmap
