#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "icecav/geometry.hpp"
#include "icecav/mdp.hpp"

namespace icecav {

struct Strides {
  double x = 840.0;
  double y = 840.0;
  double z = 25.0;
};

enum class NodeStatus : std::uint8_t {
  valid,               ///< planning state; gets a Bellman backup
  terminal,            ///< valid state inside a terminal footprint; value pinned to its reward
  not_navigable,       ///< outside the water column or the navigable horizontal domain
  below_depth_rating,  ///< in water but at or below z_min
};

/// Uniform lattice over the navigable bounding box.
///
/// Node (i, j, k) sits at (x_lo + i sx, y_lo + j sy, z_hi - k sz); k = 0 is the shallowest
/// level. Node index is i + ni (j + nj k).
class LatticeSpec {
 public:
  LatticeSpec() = default;
  LatticeSpec(double x_lo, double y_lo, double z_hi, Strides strides, int ni, int nj, int nk);

  int ni() const { return ni_; }
  int nj() const { return nj_; }
  int nk() const { return nk_; }
  const Strides& strides() const { return strides_; }
  double x_lo() const { return x_lo_; }
  double y_lo() const { return y_lo_; }
  double z_hi() const { return z_hi_; }
  std::size_t node_count() const { return std::size_t(ni_) * nj_ * nk_; }

  std::size_t index(int i, int j, int k) const { return std::size_t(i) + std::size_t(ni_) * (std::size_t(j) + std::size_t(nj_) * k); }
  std::array<int, 3> coords(std::size_t n) const;
  Vec3 position(std::size_t n) const;
  Vec3 position(int i, int j, int k) const { return {x_lo_ + i * strides_.x, y_lo_ + j * strides_.y, level_z(k)}; }
  double level_z(int k) const { return z_hi_ - k * strides_.z; }

  NodeStatus status(std::size_t n) const { return status_[n]; }
  /// Valid or terminal: usable as an interpolation vertex.
  bool is_vertex(std::size_t n) const { return status_[n] == NodeStatus::valid || status_[n] == NodeStatus::terminal; }
  bool is_solved(std::size_t n) const { return status_[n] == NodeStatus::valid; }
  int terminal_region(std::size_t n) const { return terminal_[n]; }

  /// Discretised actions of node n as lattice level indices, ordered by increasing depth
  /// change with descent before ascent at equal magnitude (the argmax tie order).
  std::span<const int> actions(std::size_t n) const {
    return {action_level_.data() + action_begin_[n], action_level_.data() + action_begin_[n + 1]};
  }
  std::size_t action_row(std::size_t n) const { return action_begin_[n]; }
  std::size_t total_actions() const { return action_level_.size(); }

  std::size_t count(NodeStatus s) const;

 private:
  friend LatticeSpec build_lattice(const CavityMdp& mdp, const Strides& strides);

  double x_lo_ = 0, y_lo_ = 0, z_hi_ = 0;
  Strides strides_;
  int ni_ = 0, nj_ = 0, nk_ = 0;
  std::vector<NodeStatus> status_;
  std::vector<int> terminal_;
  std::vector<std::size_t> action_begin_;
  std::vector<int> action_level_;
};

/// Nodes cover the navigable bounding box at the given strides; statuses come from
/// is_valid_state and classify_terminal. Throws ConfigError for non-positive strides, fewer than
/// two nodes along an axis, or when no column holds two valid levels.
LatticeSpec build_lattice(const CavityMdp& mdp, const Strides& strides);

/// Lattice cell containing p (clamped to the lattice), with in-cell offsets in [0, 1].
struct CellLocation {
  int i0 = 0, j0 = 0, k0 = 0;
  double fx = 0, fy = 0, fz = 0;
};

CellLocation locate_cell(const LatticeSpec& lattice, const Vec3& p);

/// Normalised inverse-distance weights over the valid vertices of the cell containing p.
/// Distances use stride-normalised axes. A vertex within 1e-9 m of p takes all the weight.
struct IdwWeights {
  std::array<std::size_t, 8> node{};
  std::array<double, 8> weight{};
  int count = 0;  ///< 0 when the cell has no valid vertex
};

IdwWeights idw_weights(const LatticeSpec& lattice, const Vec3& p);

/// idw_weights from precomputed inverse stride-normalised corner distances, inv[c * step] for
/// corner c (layout of kernels::InverseDistanceFn).
IdwWeights idw_from_inverse(const LatticeSpec& lattice, const CellLocation& cell, const double* inv, std::size_t step);

/// Interpolated value at p; `empty_cell_value` when the cell has no valid vertex.
double interpolate_value(const LatticeSpec& lattice, std::span<const double> values, const Vec3& p,
                         double empty_cell_value);

/// Nearest node passing `accept` by stride-normalised distance, searching one cell around p.
/// Ties go to the lowest node index. Returns node_count() when none lies within one cell diagonal.
std::size_t nearest_node(const LatticeSpec& lattice, const Vec3& p, bool (*accept)(const LatticeSpec&, std::size_t));

}  // namespace icecav
