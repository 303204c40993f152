#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "icecav/lattice.hpp"
#include "icecav/solver.hpp"

namespace icecav {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hash of a JSON document's compact dump.
std::string config_hash(const nlohmann::json& doc);

struct SolveMeta {
  Strides strides;
  double subsample = 0.2;
  double tolerance = 1.0;
  int max_iters = 5000;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;
  double wall_seconds = 0.0;
  std::string config_hash;
  int ni = 0, nj = 0, nk = 0;
};

nlohmann::json solve_meta_to_json(const SolveMeta& m);
SolveMeta solve_meta_from_json(const nlohmann::json& doc);

/// values.raw and policy.raw (float64 per node, NaN where undefined), q.raw (float64 per
/// action row) and solve_meta.json.
void write_solution_archive(const std::filesystem::path& dir, const Solution& sol, const SolveMeta& meta);

struct LoadedSolution {
  Solution solution;
  SolveMeta meta;
};

/// Reads an archive written for `lattice`; throws IoError for missing files and ConfigError when
/// the archive does not match the lattice.
LoadedSolution read_solution_archive(const std::filesystem::path& dir, const LatticeSpec& lattice);

/// Reads only solve_meta.json (to rebuild the lattice before reading the arrays).
SolveMeta read_solve_meta(const std::filesystem::path& dir);

/// Adds or replaces the "run" section of dir/manifest.json: tool version, command, input
/// hashes, wall time, and the FNV-1a hash of every listed output file.
void write_run_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& inputs,
                        double wall_seconds, const std::vector<std::string>& files);

}  // namespace icecav
