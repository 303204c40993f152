#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "icecav/mdp.hpp"
#include "icecav/policies.hpp"

namespace icecav {

struct RolloutConfig {
  int n_rollouts = 500;
  Vec3 start;
  double timeout = 7'776'000.0;  ///< s; three 30-day months
  std::uint64_t seed = 0;
  std::string success_label = "grounding_zone";
  int threads = 1;

  /// Also checks the start state against the MDP. Throws ConfigError.
  void validate(const CavityMdp& mdp) const;
};

/// One logged step: the state at elapsed time t, the observed position, and the clipped action.
struct RolloutStep {
  double t = 0.0;
  Vec3 state;
  Vec3 observed;
  double action = 0.0;
};

struct RolloutRecord {
  int index = 0;
  double start_time = 0.0;  ///< model time at t = 0
  std::vector<RolloutStep> steps;
  Vec3 final_state;
  std::string outcome;       ///< terminal label, "infeasible" or "timeout"
  double elapsed = 0.0;      ///< s until the outcome
  double cumulative_reward = 0.0;  ///< step rewards plus the terminal reward
  double energy = 0.0;             ///< minus the sum of step rewards
};

struct RolloutStats {
  std::string policy;
  int n = 0;
  int successes = 0;
  double success_fraction = 0.0;
  double median_hours = 0.0;  ///< NaN without successes
  double std_hours = 0.0;     ///< sample standard deviation; NaN with fewer than two successes

  bool operator==(const RolloutStats&) const = default;
};

/// Model time at which rollout `index` starts: a uniform time step drawn from a stream that
/// depends only on (seed, index), so every policy sees the same start times.
double rollout_start_time(const GroundTruthFlow& truth, std::uint64_t seed, int index);

RolloutRecord run_rollout(const GroundTruthFlow& truth, const CavityMdp& mdp, const Policy& policy,
                          const RolloutConfig& config, int index);

/// Rollouts 0 .. n - 1 in index order, run on config.threads workers.
std::vector<RolloutRecord> run_rollouts(const GroundTruthFlow& truth, const CavityMdp& mdp, const Policy& policy,
                                        const RolloutConfig& config);

RolloutStats summarize(const std::string& policy, const std::vector<RolloutRecord>& records,
                       const std::string& success_label);

struct ExperimentResult {
  std::vector<RolloutStats> stats;
  std::vector<std::vector<RolloutRecord>> records;
};

ExperimentResult run_experiment(const GroundTruthFlow& truth, const CavityMdp& mdp, const std::vector<Policy>& policies,
                                const RolloutConfig& config);

nlohmann::json stats_to_json(const RolloutStats& s);
RolloutStats stats_from_json(const nlohmann::json& doc);

std::string trajectories_csv(const std::vector<RolloutRecord>& records);
std::string outcomes_csv(const std::vector<RolloutRecord>& records);

/// Writes trajectories.csv, outcomes.csv and stats.json into `dir`. Throws IoError.
void export_rollouts(const std::vector<RolloutRecord>& records, const RolloutStats& stats,
                     const std::filesystem::path& dir);

}  // namespace icecav
