#pragma once

#include <cstdint>

#include "icecav/flowfield.hpp"

namespace icecav {

/// Parameters of the synthetic ice-shelf cavity.
///
/// The cavity runs along +x from an open inlet at `inlet_x` to a grounded ice wall at
/// `grounding_x`. Ice draft and seafloor vary linearly between the two; rock fills a
/// `wall_margin` strip along both side walls. The mean flow is an overturning cell: inflow
/// toward the grounding zone in the lower water column and return flow near the ceiling.
/// Eddies are a random superposition of plane waves in a streamfunction, so they are
/// horizontally non-divergent with per-component RMS `eddy_amplitude` at the surface,
/// tapering linearly to `eddy_bottom_ratio` times that at the domain floor.
struct CavityParams {
  double length_x = 40000.0;
  double width_y = 20000.0;
  double depth = 600.0;
  double dx = 1000.0;
  double dy = 1000.0;
  double dz = 20.0;
  double dt = 3600.0;
  int nt = 720;

  double inlet_x = 0.0;
  double grounding_x = 38000.0;
  double ceiling_inlet = -100.0;
  double ceiling_grounding = -520.0;
  double floor_inlet = -600.0;
  double floor_grounding = -600.0;
  double wall_margin = 1000.0;

  double mean_speed = 0.08;
  /// Thickness (fraction of the column) of the frictional layer above the seafloor.
  double bottom_layer_fraction = 0.05;
  double eddy_amplitude = 0.03;
  double eddy_correlation_time = 3.0 * 86400.0;
  double eddy_wavelength = 8000.0;
  double eddy_bottom_ratio = 0.3;

  /// Throws ConfigError on inconsistent geometry or out-of-range values.
  void validate() const;

  GridSpec grid_spec() const;

  double ceiling_at(double x) const;
  double floor_at(double x) const;
  bool column_is_open(double x, double y) const;
  /// Eddy RMS envelope at elevation z.
  double eddy_scale_at(double z) const;
};

/// Deterministic for a fixed seed: the same (params, seed) yields bit-identical grids.
FlowGrid synthesize_cavity(const CavityParams& params, std::uint64_t seed);

}  // namespace icecav
