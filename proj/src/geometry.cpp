#include "homecore/geometry.hpp"

#include <algorithm>
#include <limits>

#include "homecore/error.hpp"

namespace homecore::geom {

double distance_point_segment(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return distance(p, a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

double wrap_angle(double a) {
  constexpr double pi = 3.141592653589793238462643383279502884;
  constexpr double two_pi = 2.0 * pi;
  a = std::fmod(a, two_pi);
  if (a <= -pi) a += two_pi;
  if (a > pi) a -= two_pi;
  return a;
}

namespace {

int orientation_sign(const Point2& a, const Point2& b, const Point2& c) {
  const double v = cross(a, b, c);
  constexpr double eps = 1e-12;
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

bool on_segment_collinear(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c,
                        const Point2& d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment_collinear(a, b, c)) return true;
  if (o2 == 0 && on_segment_collinear(a, b, d)) return true;
  if (o3 == 0 && on_segment_collinear(c, d, a)) return true;
  if (o4 == 0 && on_segment_collinear(c, d, b)) return true;
  return false;
}

void validate_simple_polygon(const std::vector<Point2>& vertices) {
  const std::size_t n = vertices.size();
  if (n < 3)
    raise(ErrorCode::invalid_polygon, "polygon needs at least 3 vertices, got " +
                                          std::to_string(n));
  for (const Point2& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      raise(ErrorCode::invalid_polygon, "polygon vertex is not finite");
  }

  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = vertices[i];
    const Point2& q = vertices[(i + 1) % n];
    area2 += p.x * q.y - q.x * p.y;
  }
  if (std::abs(area2) < 1e-18)
    raise(ErrorCode::invalid_polygon, "polygon has zero area");

  // Pairwise edge intersection, skipping edges that share an endpoint.
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices[i];
    const Point2& b = vertices[(i + 1) % n];
    if (distance(a, b) < 1e-15)
      raise(ErrorCode::invalid_polygon,
            "degenerate zero-length edge at index " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      const Point2& c = vertices[j];
      const Point2& d = vertices[(j + 1) % n];
      if (segments_intersect(a, b, c, d))
        raise(ErrorCode::invalid_polygon,
              "self-intersection between edges " + std::to_string(i) + " and " +
                  std::to_string(j));
    }
  }
}

Polygon2::Polygon2(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  validate_simple_polygon(vertices_);
  if (signed_area() < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

Polygon2 Polygon2::make_unchecked(std::vector<Point2> vertices) {
  Polygon2 p;
  p.vertices_ = std::move(vertices);
  return p;
}

double Polygon2::signed_area() const {
  double area2 = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = vertices_[i];
    const Point2& q = vertices_[(i + 1) % n];
    area2 += p.x * q.y - q.x * p.y;
  }
  return 0.5 * area2;
}

Point2 Polygon2::centroid() const {
  const std::size_t n = vertices_.size();
  double cx = 0.0, cy = 0.0, area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = vertices_[i];
    const Point2& q = vertices_[(i + 1) % n];
    const double w = p.x * q.y - q.x * p.y;
    area2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (std::abs(area2) < 1e-18) {
    // Fall back to the vertex mean for near-degenerate contours.
    Point2 mean{0.0, 0.0};
    for (const Point2& v : vertices_) mean = mean + v;
    return mean * (1.0 / static_cast<double>(n));
  }
  return {cx / (3.0 * area2), cy / (3.0 * area2)};
}

bool Polygon2::contains(const Point2& p) const {
  const std::size_t n = vertices_.size();
  if (n < 3) raise(ErrorCode::invalid_polygon, "contains: fewer than 3 vertices");

  if (boundary_distance(p) <= kBoundaryTolerance) return true;

  // Winding number from the sign of the outer product against each edge.
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = vertices_[i];
    const Point2& b = vertices_[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(a, b, p) > 0.0) ++winding;
    } else {
      if (b.y <= p.y && cross(a, b, p) < 0.0) --winding;
    }
  }
  return winding != 0;
}

double Polygon2::boundary_distance(const Point2& p) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best,
                    distance_point_segment(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

void Polygon2::bounding_box(Point2& lo, Point2& hi) const {
  lo = {std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity()};
  hi = {-std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (const Point2& v : vertices_) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
}

}  // namespace homecore::geom
