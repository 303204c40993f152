#pragma once

#include <string>
#include <string_view>

#include "icecav/lattice.hpp"
#include "icecav/mdp.hpp"
#include "icecav/rng.hpp"
#include "icecav/solver.hpp"

namespace icecav {

/// Axis-aligned Gaussian position belief.
struct Belief {
  Vec3 mean;
  Vec3 sigma;
  int samples = 64;

  void validate() const;
};

struct PolicySpec {
  enum class Kind { uncontrolled, constant_fraction, mdp, qmdp };
  Kind kind = Kind::uncontrolled;
  double fraction = 0.75;           ///< constant_fraction only, in (0, 1)
  Vec3 sigma{1000.0, 1000.0, 3.0};  ///< qmdp only
  int belief_samples = 64;          ///< qmdp only

  bool needs_solution() const { return kind == Kind::mdp || kind == Kind::qmdp; }
  /// Canonical flag form, parseable by parse_policy.
  std::string to_string() const;
};

/// "uncontrolled" | "constfrac:<f>" | "mdp" | "qmdp:<sx>,<sy>,<sz>,<Nb>". Throws ConfigError.
PolicySpec parse_policy(std::string_view text);

/// Holds depth.
inline double uncontrolled_action(const Vec3& s) { return s.z; }

/// ceiling - f (ceiling - floor) at (x, y), clipped to action_set(s).
double constant_fraction_action(const CavityMdp& mdp, const Vec3& s, double f);

inline double mdp_action(const CavityMdp& mdp, const LatticeSpec& lattice, const Solution& sol, const Vec3& s) {
  return policy_lookup(mdp, lattice, sol, s);
}

/// QMDP over a sampled belief.
///
/// Samples are drawn until `belief.samples` are valid states with a solved lattice node within
/// one cell, or 10 * samples draws were spent. Each retained sample scores an action by the Q of
/// its nearest solved node; candidates are the lattice levels admissible at every such node.
/// The best average Q wins, ties toward the smaller level change from the node nearest the mean,
/// descent first. The result is clipped to action_set(mean) when the mean is valid.
/// With no retained sample or an empty candidate set it falls back to mdp_action at the mean.
double qmdp_action(const CavityMdp& mdp, const LatticeSpec& lattice, const Solution& sol, const Belief& belief, Rng& rng);

/// A policy bound to its model. Perfect-knowledge policies act on the true state; QMDP acts on
/// a belief centred at the observed position.
class Policy {
 public:
  Policy(PolicySpec spec, const CavityMdp& mdp, const LatticeSpec* lattice = nullptr, const Solution* solution = nullptr);

  const PolicySpec& spec() const { return spec_; }
  /// Zero for everything except QMDP.
  Vec3 observation_sigma() const;
  double action(const Vec3& truth, const Vec3& observed, Rng& rng) const;

 private:
  PolicySpec spec_;
  const CavityMdp* mdp_;
  const LatticeSpec* lattice_;
  const Solution* solution_;
};

}  // namespace icecav
