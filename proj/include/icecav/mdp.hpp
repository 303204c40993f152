#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "icecav/envelope.hpp"
#include "icecav/flowfield.hpp"
#include "icecav/geometry.hpp"

namespace icecav {

/// Planning-problem constants. Costs are encoded as non-positive rewards.
struct MdpConfig {
  double delta = 3600.0;            ///< planning step (s)
  double z_min = -1000.0;           ///< depth rating as signed elevation; states need z > z_min
  double ascent_rate_max = 0.05;    ///< m/s, > 0
  double descent_rate_min = -0.05;  ///< m/s, < 0
  double gamma = 0.999;
  double e_h = -1.0;                ///< hotel load per step
  double alpha_b = -0.04;           ///< pump cost per metre ascended
  double r_infeasible = -1000.0;

  void validate() const;

  double max_ascent() const { return delta * ascent_rate_max; }
  double max_descent() const { return delta * descent_rate_min; }
};

struct TerminalRegion {
  std::string label;
  double reward = 0.0;
  Polygon footprint;
  std::optional<std::pair<double, double>> z_range;  ///< [lo, hi] elevation, inclusive

  bool contains(const Vec3& p) const;
};

inline constexpr const char* kInfeasibleLabel = "infeasible";

/// Velocity distribution lookup used by the planner.
using DistributionFn = std::function<EmpiricalVelocityDistribution(const Vec3&)>;

/// The discretised-time, continuous-state planning problem.
struct CavityMdp {
  NavigableEnvelope envelope;
  DistributionFn distributions;
  std::vector<TerminalRegion> terminals;
  MdpConfig config;

  /// Labels unique and not "infeasible"; every footprint overlaps the navigable horizontal box.
  void validate() const;

  double max_terminal_reward() const;
};

/// Planner-side flow model: distributions from the retained (subsampled) time steps only.
class PlannerFlowModel {
 public:
  PlannerFlowModel(std::shared_ptr<const FlowGrid> grid, NavigableEnvelope envelope, double subsample);

  EmpiricalVelocityDistribution distribution(const Vec3& p) const;
  const std::vector<int>& retained_steps() const { return steps_; }
  int stride() const { return stride_; }
  bool uses_all_time_steps() const { return stride_ == 1; }

 private:
  std::shared_ptr<const FlowGrid> grid_;
  NavigableEnvelope envelope_;
  int stride_;
  std::vector<int> steps_;
};

/// Simulator-side flow: every stored time step, with the time axis wrapping cyclically.
class GroundTruthFlow {
 public:
  explicit GroundTruthFlow(std::shared_ptr<const FlowGrid> grid) : grid_(std::move(grid)) {}

  Vec3 velocity(const Vec3& p, double t) const { return interpolate_velocity(*grid_, p, t, TimeMode::cyclic); }
  static constexpr bool uses_all_time_steps() { return true; }
  const FlowGrid& grid() const { return *grid_; }

 private:
  std::shared_ptr<const FlowGrid> grid_;
};

CavityMdp make_cavity_mdp(std::shared_ptr<const FlowGrid> grid, std::vector<TerminalRegion> terminals,
                          const MdpConfig& config, double subsample);

/// (x, y) navigable, z within the column, and z above the depth rating.
bool is_valid_state(const CavityMdp& mdp, const Vec3& s);

/// Reachable depths from one state: rate limits intersected with the column and depth rating.
struct ActionInterval {
  double lo = 0.0;  ///< inclusive
  double hi = 0.0;
  bool hi_open = true;  ///< true when the ascent-rate limit binds (a - z < delta * ascent_rate_max)

  bool contains(double a) const { return a >= lo && (hi_open ? a < hi : a <= hi); }
  /// Nearest admissible depth.
  double clip(double a) const;
};

/// Throws DomainError if `s` is not a valid state.
ActionInterval action_set(const CavityMdp& mdp, const Vec3& s);

struct Outcome {
  enum class Kind { nonterminal, terminal, infeasible };
  Kind kind = Kind::nonterminal;
  int region = -1;  ///< index into terminals for Kind::terminal
  std::string label;
  double reward = 0.0;

  bool is_terminal() const { return kind != Kind::nonterminal; }
};

/// Terminal footprints in declaration order (first hit wins), then the implicit infeasible
/// terminal for invalid states.
Outcome classify_terminal(const CavityMdp& mdp, const Vec3& s);

/// Horizontal drift for one planning step; depth set by the action.
inline Vec3 displaced(const Vec3& s, double a, const Vec3& velocity, double delta) {
  return {s.x + velocity.x * delta, s.y + velocity.y * delta, a};
}

struct StepResult {
  Vec3 next;
  Outcome outcome;
};

/// Throws ActionError when `a` is outside action_set(s).
StepResult step(const CavityMdp& mdp, const Vec3& s, double a, const Vec3& velocity);

double reward(const CavityMdp& mdp, const Vec3& s, double a);

/// One displaced state of the transition kernel together with the number of velocity
/// samples producing it.
struct SupportPoint {
  Vec3 next;
  int count = 0;
};

/// Distinct successors of (s, a) under the distribution at s, in first-occurrence order.
std::vector<SupportPoint> transition_support(const CavityMdp& mdp, const Vec3& s, double a);

/// Fraction of velocity samples at s that displace s to `next`, times 1{next.z == a}.
double transition_probability(const CavityMdp& mdp, const Vec3& s, double a, const Vec3& next);

}  // namespace icecav
