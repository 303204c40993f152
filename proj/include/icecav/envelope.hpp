#pragma once

#include <cstdint>
#include <vector>

#include "icecav/geometry.hpp"

namespace icecav {

class FlowGrid;

struct ColumnBounds {
  bool navigable = false;
  double floor = 0.0;    ///< seafloor elevation (m)
  double ceiling = 0.0;  ///< ice-draft elevation (m)

  bool contains(double z) const { return navigable && z >= floor && z <= ceiling; }
};

/// Water-column bounds at grid column centres, bilinearly interpolated in x and y.
///
/// A location is navigable only when all four surrounding column centres are navigable, which
/// truncates the raw grid by half a cell on every horizontal side.
class NavigableEnvelope {
 public:
  NavigableEnvelope() = default;

  /// Columns are x-fastest; column (i, j) is centred at (x0 + i dx, y0 + j dy).
  NavigableEnvelope(double x0, double y0, double dx, double dy, int nx, int ny,
                    std::vector<double> floors, std::vector<double> ceilings);

  ColumnBounds at(double x, double y) const;
  ColumnBounds column(int i, int j) const;

  bool contains(const Vec3& p) const { return at(p.x, p.y).contains(p.z); }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double x_lo() const { return x0_; }
  double x_hi() const { return x0_ + (nx_ - 1) * dx_; }
  double y_lo() const { return y0_; }
  double y_hi() const { return y0_ + (ny_ - 1) * dy_; }

 private:
  double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
  int nx_ = 0, ny_ = 0;
  std::vector<double> floor_, ceiling_;
  std::vector<std::uint8_t> wet_;
};

/// Per-column water interval from wet fractions.
///
/// A partially wet cell holds f*dz of water on its wet side: the ceiling is the highest
/// (bottom face + f dz) over wet cells and the floor the lowest (top face - f dz). Both are
/// monotone in every wet fraction, so adding water never shrinks a column.
NavigableEnvelope navigable_envelope(const FlowGrid& grid);

}  // namespace icecav
