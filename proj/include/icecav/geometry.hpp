#pragma once

#include <cmath>
#include <vector>

namespace icecav {

/// Position (m) or velocity (m/s). z is signed elevation, negative below the surface.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Simple (non self-intersecting) polygon in the horizontal plane.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }

  /// Even-odd rule. Points on an edge count as inside.
  bool contains(double x, double y) const;

  double signed_area() const;

 private:
  std::vector<Point2> vertices_;
  double min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
};

}  // namespace icecav
