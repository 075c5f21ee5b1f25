#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace homecore::geom {

/// Points on or near a polygon boundary (within this distance, meters) count
/// as inside, so a robot standing in a doorway still resolves to a room.
inline constexpr double kBoundaryTolerance = 1e-9;

struct Point2 {
  double x = 0.0, y = 0.0;

  Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }

/// z component of (a - o) x (b - o); the outer-product primitive behind the
/// winding containment test.
inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }

inline double distance(const Point2& a, const Point2& b) { return norm(b - a); }

double distance_point_segment(const Point2& p, const Point2& a, const Point2& b);

/// Normalizes an angle to (-pi, pi].
double wrap_angle(double a);

/// Simple polygon stored counter-clockwise. Construction validates the
/// Polygon2 invariants (>=3 vertices, simple, nonzero area) and flips
/// clockwise input. Use make_unchecked only for already-validated data.
class Polygon2 {
 public:
  Polygon2() = default;
  explicit Polygon2(std::vector<Point2> vertices);

  static Polygon2 make_unchecked(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point2& operator[](std::size_t i) const { return vertices_[i]; }

  double signed_area() const;
  double area() const { return std::abs(signed_area()); }
  /// Area centroid.
  Point2 centroid() const;

  /// True iff p is inside, by cross-product winding-number accumulation.
  /// Boundary points within kBoundaryTolerance classify as inside.
  bool contains(const Point2& p) const;

  /// Distance from p to the closest boundary point (0 only on the boundary).
  double boundary_distance(const Point2& p) const;

  void bounding_box(Point2& lo, Point2& hi) const;

 private:
  std::vector<Point2> vertices_;
};

/// Shared validation used by the constructor; throws invalid_polygon with the
/// violated condition in the message.
void validate_simple_polygon(const std::vector<Point2>& vertices);

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c,
                        const Point2& d);

}  // namespace homecore::geom
