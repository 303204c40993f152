#include "icecav/geometry.hpp"

#include <algorithm>

#include "icecav/error.hpp"

namespace icecav {

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
  min_x_ = max_x_ = vertices_[0].x;
  min_y_ = max_y_ = vertices_[0].y;
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError("polygon vertex is not finite");
    min_x_ = std::min(min_x_, p.x);
    max_x_ = std::max(max_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_y_ = std::max(max_y_, p.y);
  }
  if (std::abs(signed_area()) <= 0.0) throw ConfigError("polygon is degenerate (zero area)");
}

double Polygon::signed_area() const {
  double a = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = vertices_[i];
    const auto& q = vertices_[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

bool Polygon::contains(double x, double y) const {
  if (vertices_.empty()) return false;
  if (x < min_x_ || x > max_x_ || y < min_y_ || y > max_y_) return false;
  const std::size_t n = vertices_.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[j];
    // on-edge check
    const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (cross == 0.0 && x >= std::min(a.x, b.x) && x <= std::max(a.x, b.x) &&
        y >= std::min(a.y, b.y) && y <= std::max(a.y, b.y)) {
      return true;
    }
    if ((a.y > y) != (b.y > y)) {
      const double xi = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x < xi) inside = !inside;
    }
  }
  return inside;
}

}  // namespace icecav
