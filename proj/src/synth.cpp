#include "icecav/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "icecav/error.hpp"
#include "icecav/rng.hpp"

namespace icecav {

namespace {

constexpr int kEddyPairs = 4;
constexpr int kEddyModes = 2 * kEddyPairs;
constexpr std::uint64_t kSynthTag = 0x5e7d;

struct EddyMode {
  double kx, ky;      // wavevector (rad/m)
  double amplitude;   // streamfunction amplitude (m^2/s)
  double omega;       // angular frequency (rad/s)
  double phase;
};

}  // namespace

void CavityParams::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("cavity params: " + what);
  };
  require(length_x > 0 && width_y > 0 && depth > 0, "domain extents must be > 0");
  require(dx > 0 && dy > 0 && dz > 0 && dt > 0, "spacings must be > 0");
  require(nt >= 2, "nt must be >= 2");
  require(std::lround(length_x / dx) >= 2 && std::lround(width_y / dy) >= 2 && std::lround(depth / dz) >= 2,
          "domain must span at least 2 cells on every axis");
  require(inlet_x >= 0 && inlet_x < grounding_x && grounding_x <= length_x,
          "need 0 <= inlet_x < grounding_x <= length_x");
  require(ceiling_inlet <= 0 && ceiling_grounding <= 0, "ice draft must be at or below the surface");
  require(floor_inlet >= -depth && floor_grounding >= -depth, "seafloor must lie within the domain depth");
  require(floor_inlet < ceiling_inlet && floor_grounding < ceiling_grounding, "seafloor lies above the ice draft");
  require(wall_margin >= 0 && 2 * wall_margin < width_y, "wall margin leaves no open water");
  require(mean_speed >= 0 && std::isfinite(mean_speed), "mean speed must be >= 0");
  require(bottom_layer_fraction > 0 && bottom_layer_fraction < 1, "bottom layer fraction must be in (0, 1)");
  require(eddy_amplitude >= 0 && std::isfinite(eddy_amplitude), "eddy amplitude must be >= 0");
  require(eddy_correlation_time > 0, "eddy correlation time must be > 0");
  require(eddy_wavelength > 0, "eddy wavelength must be > 0");
  require(eddy_bottom_ratio >= 0 && eddy_bottom_ratio <= 1, "eddy bottom ratio must be in [0, 1]");
}

GridSpec CavityParams::grid_spec() const {
  GridSpec g;
  g.nx = static_cast<int>(std::lround(length_x / dx));
  g.ny = static_cast<int>(std::lround(width_y / dy));
  g.nz = static_cast<int>(std::lround(depth / dz));
  g.nt = nt;
  g.dx = dx;
  g.dy = dy;
  g.dz = dz;
  g.dt = dt;
  g.x0 = 0.5 * dx;
  g.y0 = 0.5 * dy;
  g.z0 = -0.5 * dz;
  g.t0 = 0.0;
  return g;
}

double CavityParams::ceiling_at(double x) const {
  const double s = std::clamp((x - inlet_x) / (grounding_x - inlet_x), 0.0, 1.0);
  return ceiling_inlet + (ceiling_grounding - ceiling_inlet) * s;
}

double CavityParams::floor_at(double x) const {
  const double s = std::clamp((x - inlet_x) / (grounding_x - inlet_x), 0.0, 1.0);
  return floor_inlet + (floor_grounding - floor_inlet) * s;
}

bool CavityParams::column_is_open(double x, double y) const {
  return x <= grounding_x && y >= wall_margin && y <= width_y - wall_margin;
}

double CavityParams::eddy_scale_at(double z) const {
  const double s = std::clamp((z + depth) / depth, 0.0, 1.0);
  return eddy_bottom_ratio + (1.0 - eddy_bottom_ratio) * s;
}

FlowGrid synthesize_cavity(const CavityParams& p, std::uint64_t seed) {
  p.validate();
  const GridSpec g = p.grid_spec();
  FlowGrid grid(g);

  // Wet fractions: overlap of each cell with [floor, ceiling] of its column.
  for (int k = 0; k < g.nz; ++k) {
    const double top = g.z_center(k) + 0.5 * g.dz;
    const double bottom = g.z_center(k) - 0.5 * g.dz;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.x_center(i), y = g.y_center(j);
        float f = 0.0f;
        if (p.column_is_open(x, y)) {
          const double overlap = std::min(top, p.ceiling_at(x)) - std::max(bottom, p.floor_at(x));
          f = static_cast<float>(std::clamp(overlap / g.dz, 0.0, 1.0));
        }
        grid.set_wet_fraction(i, j, k, f);
      }
    }
  }

  Rng rng(stream_seed(seed, kSynthTag, 0));
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  // Eddy modes: pairs of perpendicular wavevectors with equal amplitude give equal u and v
  // variance. Frequencies are distinct integer multiples of 2*pi/period so the modes are
  // orthogonal over the stored time series.
  std::array<EddyMode, kEddyModes> modes{};
  {
    const double kmag = 2.0 * std::numbers::pi / p.eddy_wavelength;
    const double amp = p.eddy_amplitude * std::sqrt(2.0 / kEddyPairs) / kmag;
    const double period = g.period();
    const long base = std::max(1L, std::lround(period / (2.0 * std::numbers::pi * p.eddy_correlation_time)));
    std::array<int, kEddyModes> order{};
    for (int m = 0; m < kEddyModes; ++m) order[m] = m;
    for (int m = kEddyModes - 1; m > 0; --m) std::swap(order[m], order[rng() % (m + 1)]);
    for (int pr = 0; pr < kEddyPairs; ++pr) {
      const double theta = uniform() * std::numbers::pi;
      for (int q = 0; q < 2; ++q) {
        EddyMode& e = modes[2 * pr + q];
        const double a = theta + q * 0.5 * std::numbers::pi;
        e.kx = kmag * std::cos(a);
        e.ky = kmag * std::sin(a);
        e.amplitude = amp;
        e.omega = 2.0 * std::numbers::pi * double(base + order[2 * pr + q]) / period;
        e.phase = uniform() * 2.0 * std::numbers::pi;
      }
    }
  }

  std::vector<double> cos_t(std::size_t(kEddyModes) * g.nt), sin_t(std::size_t(kEddyModes) * g.nt);
  for (int n = 0; n < g.nt; ++n) {
    for (int m = 0; m < kEddyModes; ++m) {
      const double b = modes[m].omega * g.time(n) + modes[m].phase;
      cos_t[std::size_t(n) * kEddyModes + m] = std::cos(b);
      sin_t[std::size_t(n) * kEddyModes + m] = std::sin(b);
    }
  }

  const double yc = 0.5 * p.width_y;
  const double half_w = 0.5 * p.width_y - p.wall_margin;
  auto lateral = [&](double y) {
    const double eta = std::clamp((y - yc) / half_w, -1.0, 1.0);
    return 1.0 - 0.5 * eta * eta;
  };
  auto profile = [&](double x, double z) {
    const double fl = p.floor_at(x), ce = p.ceiling_at(x);
    const double sigma = std::clamp((z - fl) / (ce - fl), 0.0, 1.0);
    return std::cos(std::numbers::pi * sigma) * (1.0 - std::exp(-sigma / p.bottom_layer_fraction));
  };
  auto cell_wet = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) return false;
    return grid.wet_fraction(i, j, k) > 0.0f;
  };

  // Fills one horizontal component. `along_x` selects u (x-faces) or v (y-faces).
  auto fill = [&](StaggeredField& field, bool along_x) {
    const int sx = field.size_x(), sy = field.size_y();
    std::vector<double> mean(std::size_t(sx) * sy * g.nz, 0.0);
    std::vector<double> scale(mean.size(), 0.0);
    std::vector<double> cos_s(mean.size() * kEddyModes), sin_s(mean.size() * kEddyModes);
    for (int k = 0; k < g.nz; ++k) {
      const double z = g.z_center(k);
      for (int j = 0; j < sy; ++j) {
        for (int i = 0; i < sx; ++i) {
          const std::size_t c = std::size_t(i) + std::size_t(sx) * (j + std::size_t(sy) * k);
          const double x = along_x ? g.x0 + (i - 0.5) * g.dx : g.x_center(i);
          const double y = along_x ? g.y_center(j) : g.y0 + (j - 0.5) * g.dy;
          // Interior faces need water on both sides; the inlet and outer x-faces stay open.
          const bool open = along_x ? (i == 0 ? cell_wet(0, j, k)
                                              : cell_wet(i - 1, j, k) && (i == g.nx || cell_wet(i, j, k)))
                                    : cell_wet(i, j - 1, k) && cell_wet(i, j, k);
          if (!open) continue;
          if (along_x) mean[c] = p.mean_speed * lateral(y) * profile(x, z);
          scale[c] = p.eddy_scale_at(z);
          for (int m = 0; m < kEddyModes; ++m) {
            const double a = modes[m].kx * x + modes[m].ky * y;
            cos_s[c * kEddyModes + m] = std::cos(a);
            sin_s[c * kEddyModes + m] = std::sin(a);
          }
        }
      }
    }
    std::array<double, kEddyModes> coef{};
    for (int m = 0; m < kEddyModes; ++m) {
      coef[m] = along_x ? modes[m].amplitude * modes[m].ky : -modes[m].amplitude * modes[m].kx;
    }
    auto& data = field.data();
    const std::size_t per_step = mean.size();
    for (int n = 0; n < g.nt; ++n) {
      const double* ct = &cos_t[std::size_t(n) * kEddyModes];
      const double* st = &sin_t[std::size_t(n) * kEddyModes];
      for (std::size_t c = 0; c < per_step; ++c) {
        if (scale[c] == 0.0) continue;
        double eddy = 0.0;
        for (int m = 0; m < kEddyModes; ++m) {
          eddy += coef[m] * (cos_s[c * kEddyModes + m] * ct[m] - sin_s[c * kEddyModes + m] * st[m]);
        }
        data[c + per_step * n] = static_cast<float>(mean[c] + scale[c] * eddy);
      }
    }
  };
  fill(grid.u(), true);
  fill(grid.v(), false);

  // w from continuity of the (time-mean) horizontal flow, integrated up from the seafloor.
  {
    StaggeredField& w = grid.w();
    const std::size_t per_step = std::size_t(w.size_x()) * w.size_y() * w.size_z();
    std::vector<double> wcol(per_step, 0.0);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        double acc = 0.0;
        for (int k = g.nz - 1; k >= 0; --k) {
          const double f = grid.wet_fraction(i, j, k);
          if (f > 0.0) {
            // Eddies are non-divergent, so the time mean of u and v carries the divergence.
            double ue = 0, uw = 0, vn = 0, vs = 0;
            for (int n = 0; n < g.nt; ++n) {
              ue += grid.u().at(i + 1, j, k, n);
              uw += grid.u().at(i, j, k, n);
              vn += grid.v().at(i, j + 1, k, n);
              vs += grid.v().at(i, j, k, n);
            }
            const double div = ((ue - uw) / g.dx + (vn - vs) / g.dy) / g.nt;
            acc -= div * f * g.dz;
          }
          wcol[std::size_t(i) + std::size_t(w.size_x()) * (j + std::size_t(w.size_y()) * k)] = f > 0.0 ? acc : 0.0;
        }
      }
    }
    auto& data = w.data();
    for (int n = 0; n < g.nt; ++n) {
      for (std::size_t c = 0; c < per_step; ++c) data[c + per_step * n] = static_cast<float>(wcol[c]);
    }
  }

  return grid;
}

}  // namespace icecav
