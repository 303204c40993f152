#include "icecav/archive.hpp"

#include <cmath>

#include "icecav/error.hpp"
#include "icecav/raw_io.hpp"

namespace icecav {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_hash(const json& doc) { return fnv1a_hex(doc.dump()); }

json solve_meta_to_json(const SolveMeta& m) {
  return {
      {"format", "icecav-solution"},
      {"version", 1},
      {"byte_order", "little"},
      {"dtype", "float64"},
      {"order", "x_fastest"},
      {"lattice", {{"stride", {m.strides.x, m.strides.y, m.strides.z}}, {"dims", {m.ni, m.nj, m.nk}}}},
      {"subsample", m.subsample},
      {"tolerance", m.tolerance},
      {"max_iters", m.max_iters},
      {"iterations", m.iterations},
      {"converged", m.converged},
      {"residuals", m.residuals},
      {"wall_seconds", m.wall_seconds},
      {"config_hash", m.config_hash},
      {"files", {{"values", "values.raw"}, {"policy", "policy.raw"}, {"q", "q.raw"}}},
  };
}

SolveMeta solve_meta_from_json(const json& doc) {
  try {
    if (doc.at("format") != "icecav-solution" || doc.at("version") != 1) {
      throw ConfigError("solve_meta.json: unsupported format");
    }
    SolveMeta m;
    const auto& lat = doc.at("lattice");
    const auto stride = lat.at("stride").get<std::vector<double>>();
    const auto dims = lat.at("dims").get<std::vector<int>>();
    if (stride.size() != 3 || dims.size() != 3) throw ConfigError("solve_meta.json: lattice needs 3 strides and dims");
    m.strides = {stride[0], stride[1], stride[2]};
    m.ni = dims[0];
    m.nj = dims[1];
    m.nk = dims[2];
    m.subsample = doc.at("subsample").get<double>();
    m.tolerance = doc.at("tolerance").get<double>();
    m.max_iters = doc.at("max_iters").get<int>();
    m.iterations = doc.at("iterations").get<int>();
    m.converged = doc.at("converged").get<bool>();
    m.residuals = doc.at("residuals").get<std::vector<double>>();
    m.wall_seconds = doc.at("wall_seconds").get<double>();
    m.config_hash = doc.at("config_hash").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("solve_meta.json: ") + e.what());
  }
}

void write_solution_archive(const fs::path& dir, const Solution& sol, const SolveMeta& meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_raw_f64(dir / "values.raw", sol.values);
  write_raw_f64(dir / "policy.raw", sol.policy_depth);
  write_raw_f64(dir / "q.raw", sol.q);
  write_json_file(dir / "solve_meta.json", solve_meta_to_json(meta));
}

SolveMeta read_solve_meta(const fs::path& dir) {
  const fs::path p = dir / "solve_meta.json";
  if (!fs::exists(p)) throw IoError("no solution archive at " + dir.string());
  return solve_meta_from_json(read_json_file(p));
}

LoadedSolution read_solution_archive(const fs::path& dir, const LatticeSpec& lattice) {
  LoadedSolution out;
  out.meta = read_solve_meta(dir);
  if (out.meta.ni != lattice.ni() || out.meta.nj != lattice.nj() || out.meta.nk != lattice.nk()) {
    throw ConfigError("solution archive lattice does not match the scenario lattice");
  }
  Solution& sol = out.solution;
  const std::size_t nodes = lattice.node_count();
  sol.values = read_raw_f64(dir / "values.raw", nodes);
  sol.policy_depth = read_raw_f64(dir / "policy.raw", nodes);
  sol.q = read_raw_f64(dir / "q.raw", lattice.total_actions());
  sol.residuals = out.meta.residuals;
  sol.iterations = out.meta.iterations;
  sol.converged = out.meta.converged;
  sol.policy_action.assign(nodes, -1);
  for (std::size_t n = 0; n < nodes; ++n) {
    if (std::isnan(sol.policy_depth[n])) continue;
    const auto acts = lattice.actions(n);
    for (std::size_t m = 0; m < acts.size(); ++m) {
      if (lattice.level_z(acts[m]) == sol.policy_depth[n]) {
        sol.policy_action[n] = static_cast<std::int32_t>(m);
        break;
      }
    }
    if (sol.policy_action[n] < 0) throw ConfigError("solution archive policy does not match the lattice actions");
  }
  return out;
}

void write_run_manifest(const fs::path& dir, const std::string& command, const json& inputs, double wall_seconds,
                        const std::vector<std::string>& files) {
  const fs::path path = dir / "manifest.json";
  json doc = fs::exists(path) ? read_json_file(path) : json::object();
  json hashes = json::object();
  for (const auto& f : files) hashes[f] = file_hash(dir / f);
  doc["run"] = {
      {"tool", "icecav"},
      {"version", kToolVersion},
      {"command", command},
      {"inputs", inputs},
      {"wall_seconds", wall_seconds},
      {"outputs", hashes},
  };
  write_json_file(path, doc);
}

}  // namespace icecav
