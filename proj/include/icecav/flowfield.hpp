#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "icecav/geometry.hpp"

namespace icecav {

/// Geometry of a regular 4-D (x, y, z, t) grid.
///
/// Cell (i, j, k) is centred at (x0 + i*dx, y0 + j*dy, z0 - k*dz); time sample n is at t0 + n*dt.
/// z is signed elevation: k = 0 is the shallowest level and elevation decreases with k.
struct GridSpec {
  int nx = 2, ny = 2, nz = 2, nt = 2;
  double dx = 1.0, dy = 1.0, dz = 1.0, dt = 1.0;
  double x0 = 0.0, y0 = 0.0, z0 = 0.0, t0 = 0.0;

  /// Throws ConfigError when counts < 2 or spacings are not positive.
  void validate() const;

  double x_center(int i) const { return x0 + i * dx; }
  double y_center(int j) const { return y0 + j * dy; }
  double z_center(int k) const { return z0 - k * dz; }
  double time(int n) const { return t0 + n * dt; }

  // Horizontal bounds after dropping the outer half cell (the cell-centre hull).
  double x_lo() const { return x0; }
  double x_hi() const { return x0 + (nx - 1) * dx; }
  double y_lo() const { return y0; }
  double y_hi() const { return y0 + (ny - 1) * dy; }
  // Vertical extent of the raw grid, face to face.
  double z_top() const { return z0 + 0.5 * dz; }
  double z_bottom() const { return z0 - (nz - 0.5) * dz; }
  double t_end() const { return t0 + (nt - 1) * dt; }
  /// Length of one cycle when the time axis is treated as periodic.
  double period() const { return nt * dt; }

  std::size_t cell_count() const { return std::size_t(nx) * ny * nz; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Staggering : std::uint8_t { x_face, y_face, z_face, center };

std::string_view to_string(Staggering s);
Staggering staggering_from_string(std::string_view s);

/// One scalar variable sampled on its own (possibly staggered) lattice, x-fastest.
class StaggeredField {
 public:
  StaggeredField() = default;
  StaggeredField(const GridSpec& spec, Staggering stagger, bool time_varying = true);

  Staggering staggering() const { return stagger_; }
  int size_x() const { return sx_; }
  int size_y() const { return sy_; }
  int size_z() const { return sz_; }
  int size_t_() const { return st_; }

  std::size_t index(int i, int j, int k, int n) const {
    return std::size_t(i) + std::size_t(sx_) * (std::size_t(j) + std::size_t(sy_) * (std::size_t(k) + std::size_t(sz_) * std::size_t(n)));
  }
  float& at(int i, int j, int k, int n) { return data_[index(i, j, k, n)]; }
  float at(int i, int j, int k, int n) const { return data_[index(i, j, k, n)]; }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

 private:
  Staggering stagger_ = Staggering::center;
  int sx_ = 0, sy_ = 0, sz_ = 0, st_ = 0;
  std::vector<float> data_;
};

/// Time-varying velocity on an Arakawa C-grid plus per-cell wet fractions.
///
/// u lives on x-faces (nx+1 samples along x), v on y-faces, w on z-faces (w at k = 0 is the top
/// face of the top cell). Face i of u sits at x0 + (i - 1/2) dx.
class FlowGrid {
 public:
  FlowGrid() = default;
  explicit FlowGrid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }

  StaggeredField& u() { return u_; }
  StaggeredField& v() { return v_; }
  StaggeredField& w() { return w_; }
  const StaggeredField& u() const { return u_; }
  const StaggeredField& v() const { return v_; }
  const StaggeredField& w() const { return w_; }

  float wet_fraction(int i, int j, int k) const { return wet_[cell_index(i, j, k)]; }
  void set_wet_fraction(int i, int j, int k, float f) { wet_[cell_index(i, j, k)] = f; }
  std::vector<float>& wet_fraction() { return wet_; }
  const std::vector<float>& wet_fraction() const { return wet_; }

  std::size_t cell_index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(spec_.nx) * (std::size_t(j) + std::size_t(spec_.ny) * std::size_t(k));
  }

  /// Throws ConfigError if shapes disagree with the GridSpec, wet fractions leave [0, 1], or any
  /// velocity is not finite.
  void validate() const;

 private:
  GridSpec spec_;
  StaggeredField u_, v_, w_;
  std::vector<float> wet_;
};

enum class Component : std::uint8_t { u, v, w };

enum class TimeMode : std::uint8_t {
  strict,  ///< t must lie in [t0, t0 + (nt-1) dt]
  cyclic,  ///< time axis wraps with period nt*dt; the last sample blends into the first
};

/// The 16 samples and weights that multilinear interpolation combines for one component.
struct Stencil4 {
  std::array<std::size_t, 16> index{};
  std::array<double, 16> weight{};
};

/// Throws DomainError naming the axis ("x", "y", "z" or "t") when the query is out of bounds.
/// Horizontal bounds are the half-cell truncated ones; z may span the full raw column; the
/// vertical fraction is clamped to the component's outermost samples.
Stencil4 interpolation_stencil(const FlowGrid& grid, Component c, const Vec3& point, double time,
                               TimeMode mode = TimeMode::strict);

double interpolate_component(const FlowGrid& grid, Component c, const Vec3& point, double time,
                             TimeMode mode = TimeMode::strict);

/// Each velocity component multilinearly interpolated on its own lattice in (x, y, z, t).
Vec3 interpolate_velocity(const FlowGrid& grid, const Vec3& point, double time,
                          TimeMode mode = TimeMode::strict);

/// Equally weighted velocity samples standing in for P(v(x, y, z)).
struct EmpiricalVelocityDistribution {
  std::vector<Vec3> samples;

  std::size_t size() const { return samples.size(); }
};

/// round(1 / subsample); throws ConfigError unless 0 < subsample <= 1.
int subsample_stride(double subsample);

/// Indices of the time samples retained at the given subsample fraction.
std::vector<int> retained_time_steps(const GridSpec& spec, double subsample);

class NavigableEnvelope;

/// One sample per retained time step, interpolated at `point`. Throws DomainError when the
/// point is not navigable.
EmpiricalVelocityDistribution velocity_distribution_at(const FlowGrid& grid,
                                                       const NavigableEnvelope& envelope,
                                                       const Vec3& point, double subsample);

/// Convenience overload that derives the envelope from the grid (expensive; avoid in loops).
EmpiricalVelocityDistribution velocity_distribution_at(const FlowGrid& grid, const Vec3& point,
                                                       double subsample);

}  // namespace icecav
