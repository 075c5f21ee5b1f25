#include "homecore/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "homecore/error.hpp"
#include "homecore/rng.hpp"

namespace homecore::semmap {

using nlohmann::json;

const Room* SemanticMap::find_room(const std::string& name) const {
  for (const Room& r : rooms)
    if (r.name == name) return &r;
  return nullptr;
}

const Furniture* SemanticMap::find_furniture(const std::string& name) const {
  for (const Furniture& f : furniture)
    if (f.name == name) return &f;
  return nullptr;
}

const Door* SemanticMap::find_door(const std::string& name) const {
  for (const Door& d : doors)
    if (d.name == name) return &d;
  return nullptr;
}

void SemanticMap::validate() const {
  auto check_unique = [](const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const std::string& n : names) {
      if (n.empty())
        raise(ErrorCode::validation_error, std::string(what) + " with empty name");
      if (!seen.insert(n).second)
        raise(ErrorCode::validation_error,
              std::string("duplicate ") + what + " name '" + n + "'");
    }
  };

  std::vector<std::string> names;
  for (const Room& r : rooms) names.push_back(r.name);
  check_unique(names, "room");
  names.clear();
  for (const Furniture& f : furniture) names.push_back(f.name);
  check_unique(names, "furniture");
  names.clear();
  for (const Door& d : doors) names.push_back(d.name);
  check_unique(names, "door");

  for (const Furniture& f : furniture) {
    const Room* room = find_room(f.room);
    if (room == nullptr)
      raise(ErrorCode::validation_error,
            "furniture '" + f.name + "' references missing room '" + f.room + "'");
    if (!room->contour.contains(f.contour.centroid()))
      raise(ErrorCode::validation_error,
            "furniture '" + f.name + "' centroid lies outside room '" + f.room + "'");
  }
  for (const Door& d : doors) {
    if (d.room_a == d.room_b)
      raise(ErrorCode::validation_error,
            "door '" + d.name + "' must connect two distinct rooms");
    for (const std::string& r : {d.room_a, d.room_b}) {
      if (find_room(r) == nullptr)
        raise(ErrorCode::validation_error,
              "door '" + d.name + "' references missing room '" + r + "'");
    }
  }
}

std::size_t OccupancyGrid::occupied_count() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells) n += (c != 0);
  return n;
}

LocateResult locate(const SemanticMap& map, const Point2& p) {
  std::vector<const Room*> hits;
  for (const Room& r : map.rooms)
    if (r.contour.contains(p)) hits.push_back(&r);

  LocateResult result;
  if (hits.empty()) return result;
  if (hits.size() == 1) {
    result.room = hits.front()->name;
    return result;
  }

  // Overlapping rooms: smallest area wins; stable order keeps file order on ties.
  const Room* best = hits.front();
  for (const Room* r : hits)
    if (r->contour.area() < best->contour.area()) best = r;
  result.room = best->name;
  std::string others;
  for (const Room* r : hits) {
    if (r == best) continue;
    if (!others.empty()) others += ", ";
    others += r->name;
  }
  result.diagnostic = "point also inside overlapping room(s): " + others;
  return result;
}

NavigationGoal navigation_point(const SemanticMap& map, const std::string& target,
                                double standoff) {
  if (standoff <= 0.0)
    raise(ErrorCode::validation_error, "standoff must be positive");
  const Furniture* item = map.find_furniture(target);
  if (item == nullptr)
    raise(ErrorCode::unknown_target, "no furniture named '" + target + "'");
  const Room* room = map.find_room(item->room);

  const auto& verts = item->contour.vertices();
  const std::size_t n = verts.size();

  bool found = false;
  std::size_t best_index = 0;
  double best_length = -1.0;
  Point2 best_goal, best_mid;

  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = verts[i];
    const Point2& b = verts[(i + 1) % n];
    const Point2 edge = b - a;
    const double length = geom::norm(edge);
    if (length < 1e-12) continue;
    // CCW contour: outward normal of a->b is (dy, -dx) / |edge|.
    const Point2 outward{edge.y / length, -edge.x / length};
    const Point2 mid = (a + b) * 0.5;
    const Point2 goal = mid + outward * standoff;

    if (!room->contour.contains(goal)) continue;
    bool collides = false;
    for (const Furniture& f : map.furniture) {
      if (f.contour.contains(goal)) {
        collides = true;
        break;
      }
    }
    if (collides) continue;

    if (length > best_length + 1e-12) {
      best_length = length;
      best_index = i;
      best_goal = goal;
      best_mid = mid;
      found = true;
    }
  }

  if (!found)
    raise(ErrorCode::no_feasible_edge,
          "no contour edge of '" + target + "' admits a goal at standoff " +
              std::to_string(standoff));

  NavigationGoal result;
  result.pose.position = best_goal;
  result.pose.yaw =
      geom::wrap_angle(std::atan2(best_mid.y - best_goal.y, best_mid.x - best_goal.x));
  result.edge_index = best_index;
  result.edge_midpoint = best_mid;
  return result;
}

OccupancyGrid inject_obstacles(const SemanticMap& map, OccupancyGrid grid) {
  if (grid.resolution <= 0.0 || grid.width < 1 || grid.height < 1)
    raise(ErrorCode::validation_error, "invalid occupancy grid");
  for (const Furniture& f : map.furniture) {
    Point2 lo, hi;
    f.contour.bounding_box(lo, hi);
    // Restrict the scan to cells whose centers can fall inside the contour.
    const int ix0 = std::max(0, static_cast<int>(std::floor((lo.x - grid.origin.x) / grid.resolution - 1.0)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((lo.y - grid.origin.y) / grid.resolution - 1.0)));
    const int ix1 = std::min(grid.width - 1, static_cast<int>(std::ceil((hi.x - grid.origin.x) / grid.resolution)));
    const int iy1 = std::min(grid.height - 1, static_cast<int>(std::ceil((hi.y - grid.origin.y) / grid.resolution)));
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        std::uint8_t& cell = grid.cells[static_cast<std::size_t>(iy) * grid.width + ix];
        if (cell) continue;
        if (f.contour.contains(grid.cell_center(ix, iy))) cell = 1;
      }
    }
  }
  return grid;
}

OccupancyGrid make_grid(const SemanticMap& map, double resolution, double margin) {
  if (resolution <= 0.0)
    raise(ErrorCode::validation_error, "resolution must be positive");
  Point2 lo{0.0, 0.0}, hi{1.0, 1.0};
  bool first = true;
  auto merge = [&](const Polygon2& poly) {
    Point2 plo, phi;
    poly.bounding_box(plo, phi);
    if (first) {
      lo = plo;
      hi = phi;
      first = false;
    } else {
      lo.x = std::min(lo.x, plo.x);
      lo.y = std::min(lo.y, plo.y);
      hi.x = std::max(hi.x, phi.x);
      hi.y = std::max(hi.y, phi.y);
    }
  };
  for (const Room& r : map.rooms) merge(r.contour);
  for (const Furniture& f : map.furniture) merge(f.contour);
  for (const Door& d : map.doors) merge(d.contour);

  OccupancyGrid grid;
  grid.origin = {lo.x - margin, lo.y - margin};
  grid.resolution = resolution;
  grid.width = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x + 2 * margin) / resolution)));
  grid.height = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y + 2 * margin) / resolution)));
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
  return grid;
}

ColorTable assign_colors(const SemanticMap& map, std::uint64_t seed) {
  std::vector<std::string> names;
  for (const Room& r : map.rooms) names.push_back(r.name);
  for (const Furniture& f : map.furniture) names.push_back(f.name);
  for (const Door& d : map.doors) names.push_back(d.name);

  Rng rng(mix_seed(seed, 0xc0104));
  ColorTable table;
  std::vector<img::Rgb> used;
  for (const std::string& name : names) {
    img::Rgb color{};
    for (int attempt = 0; attempt < 10000; ++attempt) {
      color = {static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
               static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
               static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
      bool clash = false;
      for (const img::Rgb& other : used) {
        const double dr = static_cast<double>(color[0]) - other[0];
        const double dg = static_cast<double>(color[1]) - other[1];
        const double db = static_cast<double>(color[2]) - other[2];
        if (std::sqrt(dr * dr + dg * dg + db * db) < 32.0) {
          clash = true;
          break;
        }
      }
      if (!clash) break;
    }
    used.push_back(color);
    table[name] = color;
  }
  return table;
}

namespace {

img::Rgb color_or_gray(const ColorTable& colors, const std::string& name) {
  auto it = colors.find(name);
  return it != colors.end() ? it->second : img::Rgb{128, 128, 128};
}

struct RenderFrame {
  Point2 lo, hi;
  double scale = 1.0;
  int width = 0, height = 0;
};

RenderFrame render_frame(const SemanticMap& map, int width_px) {
  RenderFrame f;
  Point2 lo, hi;
  bool first = true;
  auto merge = [&](const Polygon2& poly) {
    Point2 plo, phi;
    poly.bounding_box(plo, phi);
    if (first) {
      lo = plo;
      hi = phi;
      first = false;
    } else {
      lo.x = std::min(lo.x, plo.x);
      lo.y = std::min(lo.y, plo.y);
      hi.x = std::max(hi.x, phi.x);
      hi.y = std::max(hi.y, phi.y);
    }
  };
  for (const Room& r : map.rooms) merge(r.contour);
  for (const Furniture& fr : map.furniture) merge(fr.contour);
  for (const Door& d : map.doors) merge(d.contour);
  if (first) {
    lo = {0, 0};
    hi = {1, 1};
  }
  const double margin = 0.25;
  f.lo = {lo.x - margin, lo.y - margin};
  f.hi = {hi.x + margin, hi.y + margin};
  f.width = std::max(16, width_px);
  f.scale = f.width / (f.hi.x - f.lo.x);
  f.height = std::max(16, static_cast<int>(std::ceil((f.hi.y - f.lo.y) * f.scale)));
  return f;
}

}  // namespace

img::RgbImage render(const SemanticMap& map, const ColorTable& colors, int width_px) {
  const RenderFrame frame = render_frame(map, width_px);
  img::RgbImage image(frame.width, frame.height, img::Rgb{255, 255, 255});

  for (int py = 0; py < frame.height; ++py) {
    for (int px = 0; px < frame.width; ++px) {
      // Image rows top-down, world y up.
      const Point2 p{frame.lo.x + (px + 0.5) / frame.scale,
                     frame.hi.y - (py + 0.5) / frame.scale};
      const Room* room_hit = nullptr;
      for (const Room& r : map.rooms)
        if (r.contour.contains(p)) {
          room_hit = &r;
          break;
        }
      if (room_hit) image.at(px, py) = color_or_gray(colors, room_hit->name);
      for (const Furniture& f : map.furniture)
        if (f.contour.contains(p)) {
          image.at(px, py) = color_or_gray(colors, f.name);
          break;
        }
      for (const Door& d : map.doors)
        if (d.contour.contains(p)) {
          image.at(px, py) = color_or_gray(colors, d.name);
          break;
        }
    }
  }
  return image;
}

std::string render_svg(const SemanticMap& map, const ColorTable& colors, int width_px) {
  const RenderFrame frame = render_frame(map, width_px);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << frame.width
      << "\" height=\"" << frame.height << "\" viewBox=\"0 0 " << frame.width << " "
      << frame.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  auto emit = [&](const Polygon2& poly, const std::string& name) {
    const img::Rgb c = color_or_gray(colors, name);
    char fill[8];
    std::snprintf(fill, sizeof fill, "#%02x%02x%02x", c[0], c[1], c[2]);
    svg << "<polygon points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2& v = poly[i];
      if (i) svg << ' ';
      svg << (v.x - frame.lo.x) * frame.scale << ','
          << (frame.hi.y - v.y) * frame.scale;
    }
    svg << "\" fill=\"" << fill << "\" stroke=\"#202020\" stroke-width=\"1\">"
        << "<title>" << name << "</title></polygon>\n";
  };

  for (const Room& r : map.rooms) emit(r.contour, r.name);
  for (const Furniture& f : map.furniture) emit(f.contour, f.name);
  for (const Door& d : map.doors) emit(d.contour, d.name);
  svg << "</svg>\n";
  return svg.str();
}

namespace {

Polygon2 parse_contour(const json& j, const std::string& context) {
  if (!j.is_array())
    raise(ErrorCode::parse_error, context + ": contour must be an array");
  std::vector<Point2> pts;
  for (const json& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      raise(ErrorCode::parse_error, context + ": contour vertices must be [x,y]");
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  try {
    return Polygon2(std::move(pts));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_polygon)
      raise(ErrorCode::validation_error, context + ": " + e.what());
    throw;
  }
}

std::string field_str(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key) || !j[key].is_string())
    raise(ErrorCode::parse_error, context + ": missing string field '" + key + "'");
  return j[key].get<std::string>();
}

json contour_json(const Polygon2& poly) {
  json arr = json::array();
  for (const Point2& v : poly.vertices()) arr.push_back(json::array({v.x, v.y}));
  return arr;
}

}  // namespace

SemanticMap load_map(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::parse_error, std::string("map JSON: ") + e.what());
  }
  if (!root.is_object()) raise(ErrorCode::parse_error, "map JSON: root must be an object");

  SemanticMap map;
  for (const json& r : root.value("rooms", json::array())) {
    const std::string name = field_str(r, "name", "room");
    if (!r.contains("contour"))
      raise(ErrorCode::parse_error, "room '" + name + "': missing contour");
    map.rooms.push_back({name, parse_contour(r["contour"], "room '" + name + "'")});
  }
  for (const json& f : root.value("furniture", json::array())) {
    const std::string name = field_str(f, "name", "furniture");
    const std::string room = field_str(f, "room", "furniture '" + name + "'");
    if (!f.contains("contour"))
      raise(ErrorCode::parse_error, "furniture '" + name + "': missing contour");
    map.furniture.push_back(
        {name, room, parse_contour(f["contour"], "furniture '" + name + "'")});
  }
  for (const json& d : root.value("doors", json::array())) {
    const std::string name = field_str(d, "name", "door");
    if (!d.contains("rooms") || !d["rooms"].is_array() || d["rooms"].size() != 2 ||
        !d["rooms"][0].is_string() || !d["rooms"][1].is_string())
      raise(ErrorCode::parse_error, "door '" + name + "': 'rooms' must be [a, b]");
    if (!d.contains("contour"))
      raise(ErrorCode::parse_error, "door '" + name + "': missing contour");
    map.doors.push_back({name, d["rooms"][0].get<std::string>(),
                         d["rooms"][1].get<std::string>(),
                         parse_contour(d["contour"], "door '" + name + "'")});
  }

  map.validate();
  return map;
}

SemanticMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open map file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_map(buffer.str());
}

std::string save_map(const SemanticMap& map) {
  json root;
  root["rooms"] = json::array();
  for (const Room& r : map.rooms)
    root["rooms"].push_back({{"name", r.name}, {"contour", contour_json(r.contour)}});
  root["furniture"] = json::array();
  for (const Furniture& f : map.furniture)
    root["furniture"].push_back(
        {{"name", f.name}, {"room", f.room}, {"contour", contour_json(f.contour)}});
  root["doors"] = json::array();
  for (const Door& d : map.doors)
    root["doors"].push_back({{"name", d.name},
                             {"rooms", json::array({d.room_a, d.room_b})},
                             {"contour", contour_json(d.contour)}});
  return root.dump(2) + "\n";
}

bool maps_equal(const SemanticMap& a, const SemanticMap& b) {
  auto poly_eq = [](const Polygon2& p, const Polygon2& q) {
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(p[i] == q[i])) return false;
    return true;
  };
  if (a.rooms.size() != b.rooms.size() || a.furniture.size() != b.furniture.size() ||
      a.doors.size() != b.doors.size())
    return false;
  for (std::size_t i = 0; i < a.rooms.size(); ++i)
    if (a.rooms[i].name != b.rooms[i].name ||
        !poly_eq(a.rooms[i].contour, b.rooms[i].contour))
      return false;
  for (std::size_t i = 0; i < a.furniture.size(); ++i)
    if (a.furniture[i].name != b.furniture[i].name ||
        a.furniture[i].room != b.furniture[i].room ||
        !poly_eq(a.furniture[i].contour, b.furniture[i].contour))
      return false;
  for (std::size_t i = 0; i < a.doors.size(); ++i)
    if (a.doors[i].name != b.doors[i].name || a.doors[i].room_a != b.doors[i].room_a ||
        a.doors[i].room_b != b.doors[i].room_b ||
        !poly_eq(a.doors[i].contour, b.doors[i].contour))
      return false;
  return true;
}

}  // namespace homecore::semmap
