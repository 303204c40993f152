#include "icecav/flowfield.hpp"

#include <cmath>
#include <string>

#include "icecav/envelope.hpp"
#include "icecav/error.hpp"

namespace icecav {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2 || nz < 2 || nt < 2) throw ConfigError("grid counts must all be >= 2");
  if (!(dx > 0) || !(dy > 0) || !(dz > 0) || !(dt > 0)) throw ConfigError("grid spacings must be > 0");
  if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(z0) || !std::isfinite(t0)) {
    throw ConfigError("grid origin must be finite");
  }
}

std::string_view to_string(Staggering s) {
  switch (s) {
    case Staggering::x_face: return "x_face";
    case Staggering::y_face: return "y_face";
    case Staggering::z_face: return "z_face";
    case Staggering::center: return "center";
  }
  return "center";
}

Staggering staggering_from_string(std::string_view s) {
  if (s == "x_face") return Staggering::x_face;
  if (s == "y_face") return Staggering::y_face;
  if (s == "z_face") return Staggering::z_face;
  if (s == "center") return Staggering::center;
  throw ConfigError("unknown staggering '" + std::string(s) + "'");
}

StaggeredField::StaggeredField(const GridSpec& spec, Staggering stagger, bool time_varying)
    : stagger_(stagger),
      sx_(spec.nx + (stagger == Staggering::x_face ? 1 : 0)),
      sy_(spec.ny + (stagger == Staggering::y_face ? 1 : 0)),
      sz_(spec.nz + (stagger == Staggering::z_face ? 1 : 0)),
      st_(time_varying ? spec.nt : 1) {
  data_.assign(std::size_t(sx_) * sy_ * sz_ * st_, 0.0f);
}

FlowGrid::FlowGrid(const GridSpec& spec)
    : spec_(spec),
      u_(spec, Staggering::x_face),
      v_(spec, Staggering::y_face),
      w_(spec, Staggering::z_face),
      wet_(spec.cell_count(), 0.0f) {
  spec.validate();
}

void FlowGrid::validate() const {
  spec_.validate();
  auto check = [&](const StaggeredField& f, Staggering s, const char* name) {
    const StaggeredField expect(spec_, s, false);
    if (f.staggering() != s || f.size_x() != expect.size_x() || f.size_y() != expect.size_y() ||
        f.size_z() != expect.size_z() || f.size_t_() != spec_.nt ||
        f.data().size() != std::size_t(expect.size_x()) * expect.size_y() * expect.size_z() * spec_.nt) {
      throw ConfigError(std::string("velocity array ") + name + " has the wrong shape");
    }
    for (float x : f.data()) {
      if (!std::isfinite(x)) throw ConfigError(std::string("velocity array ") + name + " has non-finite values");
    }
  };
  check(u_, Staggering::x_face, "u");
  check(v_, Staggering::y_face, "v");
  check(w_, Staggering::z_face, "w");
  if (wet_.size() != spec_.cell_count()) throw ConfigError("wet fraction array has the wrong shape");
  for (float f : wet_) {
    if (!(f >= 0.0f && f <= 1.0f)) throw ConfigError("wet fraction outside [0, 1]");
  }
}

namespace {

struct AxisPos {
  int i0;
  double frac;
};

// Locates `coord` on a uniform axis with `count` samples, first sample at `origin` and signed
// `step`. The fraction is clamped to the sample range.
AxisPos locate(double coord, double origin, double step, int count) {
  double f = (coord - origin) / step;
  if (f <= 0.0) return {0, 0.0};
  if (f >= count - 1) return {count - 2, 1.0};
  int i = static_cast<int>(std::floor(f));
  if (i > count - 2) i = count - 2;
  return {i, f - i};
}

[[noreturn]] void out_of_bounds(const char* axis, double value, double lo, double hi) {
  throw DomainError(std::string("query out of bounds on axis ") + axis + ": " + std::to_string(value) +
                    " not in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

Stencil4 interpolation_stencil(const FlowGrid& grid, Component c, const Vec3& p, double time,
                               TimeMode mode) {
  const GridSpec& g = grid.spec();
  if (!(p.x >= g.x_lo() && p.x <= g.x_hi())) out_of_bounds("x", p.x, g.x_lo(), g.x_hi());
  if (!(p.y >= g.y_lo() && p.y <= g.y_hi())) out_of_bounds("y", p.y, g.y_lo(), g.y_hi());
  if (!(p.z >= g.z_bottom() && p.z <= g.z_top())) out_of_bounds("z", p.z, g.z_bottom(), g.z_top());

  const StaggeredField& field = c == Component::u ? grid.u() : c == Component::v ? grid.v() : grid.w();

  const AxisPos ax = c == Component::u ? locate(p.x, g.x0 - 0.5 * g.dx, g.dx, g.nx + 1)
                                       : locate(p.x, g.x0, g.dx, g.nx);
  const AxisPos ay = c == Component::v ? locate(p.y, g.y0 - 0.5 * g.dy, g.dy, g.ny + 1)
                                       : locate(p.y, g.y0, g.dy, g.ny);
  const AxisPos az = c == Component::w ? locate(p.z, g.z0 + 0.5 * g.dz, -g.dz, g.nz + 1)
                                       : locate(p.z, g.z0, -g.dz, g.nz);

  int n0 = 0, n1 = 1;
  double ft = 0.0;
  if (mode == TimeMode::strict) {
    if (!(time >= g.t0 && time <= g.t_end())) out_of_bounds("t", time, g.t0, g.t_end());
    const AxisPos at = locate(time, g.t0, g.dt, g.nt);
    n0 = at.i0;
    n1 = at.i0 + 1;
    ft = at.frac;
  } else {
    if (!std::isfinite(time)) out_of_bounds("t", time, g.t0, g.t0 + g.period());
    double tau = std::fmod(time - g.t0, g.period());
    if (tau < 0) tau += g.period();
    double f = tau / g.dt;
    n0 = static_cast<int>(std::floor(f));
    if (n0 >= g.nt) n0 = g.nt - 1;
    ft = f - n0;
    if (ft > 1.0) ft = 1.0;
    n1 = (n0 + 1) % g.nt;
  }

  Stencil4 s;
  int m = 0;
  for (int dn = 0; dn < 2; ++dn) {
    const int n = dn ? n1 : n0;
    const double wt = dn ? ft : 1.0 - ft;
    for (int dk = 0; dk < 2; ++dk) {
      const double wz = dk ? az.frac : 1.0 - az.frac;
      for (int dj = 0; dj < 2; ++dj) {
        const double wy = dj ? ay.frac : 1.0 - ay.frac;
        for (int di = 0; di < 2; ++di) {
          const double wx = di ? ax.frac : 1.0 - ax.frac;
          s.index[m] = field.index(ax.i0 + di, ay.i0 + dj, az.i0 + dk, n);
          s.weight[m] = wx * wy * wz * wt;
          ++m;
        }
      }
    }
  }
  return s;
}

double interpolate_component(const FlowGrid& grid, Component c, const Vec3& p, double time, TimeMode mode) {
  const Stencil4 s = interpolation_stencil(grid, c, p, time, mode);
  const auto& data = (c == Component::u ? grid.u() : c == Component::v ? grid.v() : grid.w()).data();
  double acc = 0.0;
  for (int m = 0; m < 16; ++m) {
    if (s.weight[m] != 0.0) acc += s.weight[m] * static_cast<double>(data[s.index[m]]);
  }
  return acc;
}

Vec3 interpolate_velocity(const FlowGrid& grid, const Vec3& p, double time, TimeMode mode) {
  return {interpolate_component(grid, Component::u, p, time, mode),
          interpolate_component(grid, Component::v, p, time, mode),
          interpolate_component(grid, Component::w, p, time, mode)};
}

int subsample_stride(double subsample) {
  if (!(subsample > 0.0 && subsample <= 1.0)) {
    throw ConfigError("subsample fraction must be in (0, 1], got " + std::to_string(subsample));
  }
  const long stride = std::lround(1.0 / subsample);
  return static_cast<int>(stride < 1 ? 1 : stride);
}

std::vector<int> retained_time_steps(const GridSpec& spec, double subsample) {
  const int stride = subsample_stride(subsample);
  std::vector<int> steps;
  for (int n = 0; n < spec.nt; n += stride) steps.push_back(n);
  return steps;
}

EmpiricalVelocityDistribution velocity_distribution_at(const FlowGrid& grid, const NavigableEnvelope& envelope,
                                                       const Vec3& point, double subsample) {
  if (!envelope.contains(point)) {
    throw DomainError("velocity distribution requested at a non-navigable point (" + std::to_string(point.x) +
                      ", " + std::to_string(point.y) + ", " + std::to_string(point.z) + ")");
  }
  EmpiricalVelocityDistribution d;
  const auto steps = retained_time_steps(grid.spec(), subsample);
  d.samples.reserve(steps.size());
  for (int n : steps) d.samples.push_back(interpolate_velocity(grid, point, grid.spec().time(n)));
  return d;
}

EmpiricalVelocityDistribution velocity_distribution_at(const FlowGrid& grid, const Vec3& point, double subsample) {
  return velocity_distribution_at(grid, navigable_envelope(grid), point, subsample);
}

}  // namespace icecav
