#include "icecav/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "icecav/error.hpp"
#include "icecav/kernels.hpp"

namespace icecav {

namespace {

constexpr double kCoincidence = 1e-9;  // metres

int count_along(double extent, double stride) {
  return static_cast<int>(std::floor(extent / stride + 1e-9)) + 1;
}

}  // namespace

LatticeSpec::LatticeSpec(double x_lo, double y_lo, double z_hi, Strides strides, int ni, int nj, int nk)
    : x_lo_(x_lo), y_lo_(y_lo), z_hi_(z_hi), strides_(strides), ni_(ni), nj_(nj), nk_(nk) {
  status_.assign(node_count(), NodeStatus::not_navigable);
  terminal_.assign(node_count(), -1);
  action_begin_.assign(node_count() + 1, 0);
}

std::array<int, 3> LatticeSpec::coords(std::size_t n) const {
  const int i = static_cast<int>(n % ni_);
  const int j = static_cast<int>((n / ni_) % nj_);
  const int k = static_cast<int>(n / (std::size_t(ni_) * nj_));
  return {i, j, k};
}

Vec3 LatticeSpec::position(std::size_t n) const {
  const auto [i, j, k] = coords(n);
  return position(i, j, k);
}

std::size_t LatticeSpec::count(NodeStatus s) const {
  return static_cast<std::size_t>(std::count(status_.begin(), status_.end(), s));
}

LatticeSpec build_lattice(const CavityMdp& mdp, const Strides& strides) {
  if (!(strides.x > 0 && strides.y > 0 && strides.z > 0)) throw ConfigError("lattice strides must be > 0");
  const NavigableEnvelope& env = mdp.envelope;

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  double z_lo = x_lo, z_hi = -x_lo;
  for (int j = 0; j < env.ny(); ++j) {
    for (int i = 0; i < env.nx(); ++i) {
      const ColumnBounds c = env.column(i, j);
      if (!c.navigable) continue;
      const double x = env.x0() + i * env.dx(), y = env.y0() + j * env.dy();
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
      z_lo = std::min(z_lo, c.floor);
      z_hi = std::max(z_hi, c.ceiling);
    }
  }
  if (!(x_lo <= x_hi)) throw ConfigError("lattice: the envelope has no navigable column");

  const int ni = count_along(x_hi - x_lo, strides.x);
  const int nj = count_along(y_hi - y_lo, strides.y);
  const int nk = count_along(z_hi - z_lo, strides.z);
  if (ni < 2 || nj < 2 || nk < 2) {
    throw ConfigError("lattice strides too large: need at least 2 nodes per axis, got " + std::to_string(ni) + "x" +
                      std::to_string(nj) + "x" + std::to_string(nk));
  }

  LatticeSpec lat(x_lo, y_lo, z_hi, strides, ni, nj, nk);
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    const Vec3 p = lat.position(n);
    if (is_valid_state(mdp, p)) {
      const Outcome o = classify_terminal(mdp, p);
      if (o.kind == Outcome::Kind::terminal) {
        lat.status_[n] = NodeStatus::terminal;
        lat.terminal_[n] = o.region;
      } else {
        lat.status_[n] = NodeStatus::valid;
      }
    } else if (env.contains(p)) {
      lat.status_[n] = NodeStatus::below_depth_rating;
    } else {
      lat.status_[n] = NodeStatus::not_navigable;
    }
  }

  int best_column = 0;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      int c = 0;
      for (int k = 0; k < nk; ++k) c += lat.is_vertex(lat.index(i, j, k)) ? 1 : 0;
      best_column = std::max(best_column, c);
    }
  }
  if (best_column < 2) throw ConfigError("lattice: z stride too large, no column holds two valid levels");

  // Discretised action sets, in tie-break order.
  const double lo_rate = mdp.config.max_descent(), hi_rate = mdp.config.max_ascent();
  lat.action_begin_.assign(lat.node_count() + 1, 0);
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    lat.action_begin_[n] = lat.action_level_.size();
    if (!lat.is_solved(n)) continue;
    const auto [i, j, k] = lat.coords(n);
    std::vector<int> levels;
    for (int kk = 0; kk < nk; ++kk) {
      const double dz = (k - kk) * strides.z;  // a - z
      if (!(dz >= lo_rate && dz < hi_rate)) continue;
      if (!is_valid_state(mdp, lat.position(i, j, kk))) continue;
      levels.push_back(kk);
    }
    std::stable_sort(levels.begin(), levels.end(), [k = k](int a, int b) {
      const int da = k - a, db = k - b;  // positive = ascent
      if (std::abs(da) != std::abs(db)) return std::abs(da) < std::abs(db);
      return da < db;
    });
    lat.action_level_.insert(lat.action_level_.end(), levels.begin(), levels.end());
  }
  lat.action_begin_[lat.node_count()] = lat.action_level_.size();
  return lat;
}

CellLocation locate_cell(const LatticeSpec& lat, const Vec3& p) {
  auto axis = [](double f, int count, int& i0, double& frac) {
    int i = static_cast<int>(std::floor(f));
    i = std::clamp(i, 0, count - 2);
    i0 = i;
    frac = f - i;
  };
  CellLocation c;
  axis((p.x - lat.x_lo()) / lat.strides().x, lat.ni(), c.i0, c.fx);
  axis((p.y - lat.y_lo()) / lat.strides().y, lat.nj(), c.j0, c.fy);
  axis((lat.z_hi() - p.z) / lat.strides().z, lat.nk(), c.k0, c.fz);
  return c;
}

IdwWeights idw_from_inverse(const LatticeSpec& lat, const CellLocation& cell, const double* inv, std::size_t step) {
  const Strides& s = lat.strides();
  IdwWeights out;
  double total = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int cx = c & 1, cy = (c >> 1) & 1, cz = (c >> 2) & 1;
    const std::size_t n = lat.index(cell.i0 + cx, cell.j0 + cy, cell.k0 + cz);
    if (!lat.is_vertex(n)) continue;
    const double dx = (cell.fx - cx) * s.x, dy = (cell.fy - cy) * s.y, dz = (cell.fz - cz) * s.z;
    if (std::sqrt(dx * dx + dy * dy + dz * dz) < kCoincidence) {
      out.count = 1;
      out.node[0] = n;
      out.weight[0] = 1.0;
      return out;
    }
    out.node[out.count] = n;
    out.weight[out.count] = inv[c * step];
    total += inv[c * step];
    ++out.count;
  }
  for (int m = 0; m < out.count; ++m) out.weight[m] /= total;
  return out;
}

IdwWeights idw_weights(const LatticeSpec& lat, const Vec3& p) {
  const CellLocation cell = locate_cell(lat, p);
  double inv[8];
  kernels::scalar::inverse_distances(&cell.fx, &cell.fy, &cell.fz, 1, inv);
  return idw_from_inverse(lat, cell, inv, 1);
}

double interpolate_value(const LatticeSpec& lat, std::span<const double> values, const Vec3& p, double empty_cell_value) {
  const IdwWeights w = idw_weights(lat, p);
  if (w.count == 0) return empty_cell_value;
  double acc = 0.0;
  for (int m = 0; m < w.count; ++m) acc += w.weight[m] * values[w.node[m]];
  return acc;
}

std::size_t nearest_node(const LatticeSpec& lat, const Vec3& p, bool (*accept)(const LatticeSpec&, std::size_t)) {
  const Strides& s = lat.strides();
  const double fx = (p.x - lat.x_lo()) / s.x, fy = (p.y - lat.y_lo()) / s.y, fz = (lat.z_hi() - p.z) / s.z;
  const int ci = static_cast<int>(std::floor(fx)), cj = static_cast<int>(std::floor(fy)), ck = static_cast<int>(std::floor(fz));
  const double limit = 3.0 + 1e-12;  // squared cell diagonal
  std::size_t best = lat.node_count();
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = std::max(0, ck - 1); k <= std::min(lat.nk() - 1, ck + 2); ++k) {
    for (int j = std::max(0, cj - 1); j <= std::min(lat.nj() - 1, cj + 2); ++j) {
      for (int i = std::max(0, ci - 1); i <= std::min(lat.ni() - 1, ci + 2); ++i) {
        const std::size_t n = lat.index(i, j, k);
        if (!accept(lat, n)) continue;
        const double dx = fx - i, dy = fy - j, dz = fz - k;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 > limit) continue;
        if (d2 < best_d2 || (d2 == best_d2 && n < best)) {
          best_d2 = d2;
          best = n;
        }
      }
    }
  }
  return best;
}

}  // namespace icecav
