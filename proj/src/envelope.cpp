#include "icecav/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "icecav/error.hpp"
#include "icecav/flowfield.hpp"

namespace icecav {

NavigableEnvelope::NavigableEnvelope(double x0, double y0, double dx, double dy, int nx, int ny,
                                     std::vector<double> floors, std::vector<double> ceilings)
    : x0_(x0), y0_(y0), dx_(dx), dy_(dy), nx_(nx), ny_(ny), floor_(std::move(floors)), ceiling_(std::move(ceilings)) {
  if (nx < 2 || ny < 2) throw ConfigError("envelope needs at least 2x2 columns");
  if (!(dx > 0) || !(dy > 0)) throw ConfigError("envelope spacing must be > 0");
  const std::size_t n = std::size_t(nx) * ny;
  if (floor_.size() != n || ceiling_.size() != n) throw ConfigError("envelope column arrays have the wrong size");
  wet_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    wet_[c] = std::isfinite(floor_[c]) && std::isfinite(ceiling_[c]) && floor_[c] < ceiling_[c] ? 1 : 0;
  }
}

ColumnBounds NavigableEnvelope::column(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return {};
  const std::size_t c = std::size_t(i) + std::size_t(nx_) * j;
  if (!wet_[c]) return {};
  return {true, floor_[c], ceiling_[c]};
}

ColumnBounds NavigableEnvelope::at(double x, double y) const {
  if (!(x >= x_lo() && x <= x_hi() && y >= y_lo() && y <= y_hi())) return {};
  const double fx = (x - x0_) / dx_;
  const double fy = (y - y0_) / dy_;
  int i = std::min(static_cast<int>(std::floor(fx)), nx_ - 2);
  int j = std::min(static_cast<int>(std::floor(fy)), ny_ - 2);
  i = std::max(i, 0);
  j = std::max(j, 0);
  const double tx = std::clamp(fx - i, 0.0, 1.0);
  const double ty = std::clamp(fy - j, 0.0, 1.0);

  double fl = 0.0, ce = 0.0;
  for (int dj = 0; dj < 2; ++dj) {
    for (int di = 0; di < 2; ++di) {
      const std::size_t c = std::size_t(i + di) + std::size_t(nx_) * (j + dj);
      if (!wet_[c]) return {};
      const double w = (di ? tx : 1.0 - tx) * (dj ? ty : 1.0 - ty);
      fl += w * floor_[c];
      ce += w * ceiling_[c];
    }
  }
  if (!(fl < ce)) return {};
  return {true, fl, ce};
}

NavigableEnvelope navigable_envelope(const FlowGrid& grid) {
  const GridSpec& g = grid.spec();
  const std::size_t ncol = std::size_t(g.nx) * g.ny;
  std::vector<double> floors(ncol, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> ceilings(ncol, std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      double ce = -std::numeric_limits<double>::infinity();
      double fl = std::numeric_limits<double>::infinity();
      bool any = false;
      for (int k = 0; k < g.nz; ++k) {
        const double f = grid.wet_fraction(i, j, k);
        if (f <= 0.0) continue;
        any = true;
        const double top = g.z_center(k) + 0.5 * g.dz;
        const double bottom = g.z_center(k) - 0.5 * g.dz;
        ce = std::max(ce, bottom + f * g.dz);
        fl = std::min(fl, top - f * g.dz);
      }
      if (!any) continue;
      ce = std::min(ce, 0.0);
      if (fl < ce) {
        floors[i + std::size_t(g.nx) * j] = fl;
        ceilings[i + std::size_t(g.nx) * j] = ce;
      }
    }
  }
  return NavigableEnvelope(g.x0, g.y0, g.dx, g.dy, g.nx, g.ny, std::move(floors), std::move(ceilings));
}

}  // namespace icecav
