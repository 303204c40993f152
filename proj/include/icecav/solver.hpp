#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "icecav/lattice.hpp"
#include "icecav/mdp.hpp"

namespace icecav {

/// Expected-value rows of the discretised Bellman operator.
///
/// Row r = lattice.action_row(n) + m holds the m-th action of solved node n:
///   Q_r(V) = reward[r] + gamma * (constant[r] + sum_e weight[e] * V[col[e]])
/// `constant` carries the terminal and infeasible rewards already divided by the sample count.
/// Entries are sorted by column and every row's weights plus its terminal mass sum to 1.
struct TransitionKernel {
  std::vector<double> reward;
  std::vector<double> constant;
  std::vector<std::size_t> row_begin;  ///< size rows + 1
  std::vector<std::int32_t> col;
  std::vector<double> weight;

  std::size_t rows() const { return reward.size(); }
  std::size_t entries() const { return col.size(); }
};

/// Deterministic for any thread count.
TransitionKernel build_transition_kernel(const CavityMdp& mdp, const LatticeSpec& lattice, int threads = 1);

/// Node values with the per-node value of pinned and unsolved nodes: terminal nodes hold their
/// region reward, solved nodes `initial`, everything else NaN.
std::vector<double> initial_values(const CavityMdp& mdp, const LatticeSpec& lattice, double initial);

struct Backup {
  double value = 0.0;
  int action = -1;  ///< index into lattice.actions(node); -1 when the node has no action
};

/// Direct Bellman backup at a solved node via step() and interpolate_value; the reference the
/// compiled kernel is tested against. Ties go to the earlier action in lattice order.
Backup bellman_backup(const CavityMdp& mdp, const LatticeSpec& lattice, std::span<const double> values, std::size_t node);

struct SolverConfig {
  double tolerance = 1.0;
  int max_iters = 5000;
  int threads = 1;
};

struct Solution {
  std::vector<double> values;           ///< per node; NaN for nodes that are neither solved nor terminal
  std::vector<double> policy_depth;     ///< per node target depth; NaN unless solved with an action
  std::vector<std::int32_t> policy_action;  ///< index into lattice.actions(node); -1 if none
  std::vector<double> q;                ///< per action row, evaluated at the final values
  std::vector<double> residuals;        ///< sup-norm residual of each sweep
  int iterations = 0;
  bool converged = false;
};

/// Synchronous sweeps from V0 = e_h / (1 - gamma) until the residual drops to the tolerance.
/// Throws ConfigError for a non-positive tolerance and NumericalError on a non-finite value.
Solution value_iteration(const CavityMdp& mdp, const LatticeSpec& lattice, const TransitionKernel& kernel,
                         const SolverConfig& config);
Solution value_iteration(const CavityMdp& mdp, const LatticeSpec& lattice, const SolverConfig& config);

/// Greedy action and value per node for fixed values, plus the Q of every action row.
void extract_policy(const CavityMdp& mdp, const LatticeSpec& lattice, const TransitionKernel& kernel, Solution& sol);

bool accept_solved(const LatticeSpec& lattice, std::size_t n);

/// Action of the nearest solved node, clipped to action_set(s). Throws DomainError when no
/// solved node lies within one cell diagonal or s is invalid.
double policy_lookup(const CavityMdp& mdp, const LatticeSpec& lattice, const Solution& sol, const Vec3& s);

}  // namespace icecav
