// icecav: synth / solve / rollout / report.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icecav/archive.hpp"
#include "icecav/error.hpp"
#include "icecav/grid_io.hpp"
#include "icecav/parallel.hpp"
#include "icecav/policies.hpp"
#include "icecav/raw_io.hpp"
#include "icecav/scenario.hpp"
#include "icecav/simulator.hpp"
#include "icecav/solver.hpp"
#include "icecav/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace icecav;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

Strides parse_strides(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--stride: bad number '" + item + "'");
    }
  }
  if (v.size() != 3) throw ConfigError("--stride expects sx,sy,sz");
  if (!(v[0] > 0 && v[1] > 0 && v[2] > 0)) throw ConfigError("--stride values must be > 0");
  return {v[0], v[1], v[2]};
}

struct Loaded {
  Scenario scenario;
  fs::path grid_dir;
  std::shared_ptr<const FlowGrid> grid;
};

Loaded load_inputs(const std::string& grid_flag, const std::string& scenario_path) {
  Loaded in;
  in.scenario = load_scenario(scenario_path);
  if (!grid_flag.empty()) {
    in.grid_dir = grid_flag;
  } else if (in.scenario.grid) {
    in.grid_dir = fs::path(scenario_path).parent_path() / *in.scenario.grid;
  } else {
    throw ConfigError("no grid: pass --grid or set \"grid\" in the scenario");
  }
  in.grid = std::make_shared<const FlowGrid>(read_grid_archive(in.grid_dir));
  return in;
}

json input_hashes(const Loaded& in, const std::string& scenario_path) {
  return {{"grid", file_hash(in.grid_dir / "u.raw") + file_hash(in.grid_dir / "v.raw") + file_hash(in.grid_dir / "w.raw") +
                       file_hash(in.grid_dir / "wetfrac.raw")},
          {"scenario", file_hash(scenario_path)}};
}

// ---------------------------------------------------------------------------------------------

struct SynthArgs {
  std::string params;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  const auto t0 = Clock::now();
  const json pdoc = read_json_file(a.params);
  const CavityParams params = cavity_params_from_json(pdoc);
  const FlowGrid grid = synthesize_cavity(params, a.seed);
  make_dir(a.out);
  write_grid_archive(grid, a.out);
  Scenario sc = default_scenario(params);
  sc.grid = ".";
  write_json_file(fs::path(a.out) / "scenario.json", scenario_to_json(sc));
  write_run_manifest(a.out, "synth", {{"params", config_hash(pdoc)}, {"seed", a.seed}}, seconds_since(t0),
                     {"u.raw", "v.raw", "w.raw", "wetfrac.raw", "scenario.json"});
  std::cout << "wrote grid " << grid.spec().nx << "x" << grid.spec().ny << "x" << grid.spec().nz << "x"
            << grid.spec().nt << " to " << a.out << "\n";
  return 0;
}

struct SolveArgs {
  std::string grid, scenario, out;
  std::string stride = "840,840,25";
  double subsample = 0.2;
  std::optional<double> tol;
  int max_iters = 5000;
  int threads = 0;
};

int cmd_solve(const SolveArgs& a) {
  const auto t0 = Clock::now();
  const Strides strides = parse_strides(a.stride);
  subsample_stride(a.subsample);
  const Loaded in = load_inputs(a.grid, a.scenario);
  const CavityMdp mdp = make_cavity_mdp(in.grid, in.scenario.terminals, in.scenario.mdp, a.subsample);

  double grounding_reward = 0.0;
  for (const auto& t : mdp.terminals) {
    if (t.label == in.scenario.success_label) grounding_reward = std::abs(t.reward);
  }
  SolverConfig cfg;
  cfg.tolerance = a.tol ? *a.tol : 1e-4 * (grounding_reward > 0 ? grounding_reward : std::abs(mdp.config.r_infeasible));
  cfg.max_iters = a.max_iters;
  cfg.threads = resolve_threads(a.threads);
  if (!(cfg.tolerance > 0) || !std::isfinite(cfg.tolerance)) throw ConfigError("--tol must be > 0");
  if (cfg.max_iters < 1) throw ConfigError("--max-iters must be >= 1");

  const LatticeSpec lattice = build_lattice(mdp, strides);
  const TransitionKernel kernel = build_transition_kernel(mdp, lattice, cfg.threads);
  const Solution sol = value_iteration(mdp, lattice, kernel, cfg);

  SolveMeta meta;
  meta.strides = strides;
  meta.subsample = a.subsample;
  meta.tolerance = cfg.tolerance;
  meta.max_iters = cfg.max_iters;
  meta.iterations = sol.iterations;
  meta.converged = sol.converged;
  meta.residuals = sol.residuals;
  meta.ni = lattice.ni();
  meta.nj = lattice.nj();
  meta.nk = lattice.nk();
  const json inputs = input_hashes(in, a.scenario);
  meta.config_hash = config_hash({{"inputs", inputs},
                                  {"stride", {strides.x, strides.y, strides.z}},
                                  {"subsample", a.subsample},
                                  {"tol", cfg.tolerance},
                                  {"max_iters", cfg.max_iters}});
  meta.wall_seconds = seconds_since(t0);
  write_solution_archive(a.out, sol, meta);
  write_run_manifest(a.out, "solve", inputs, meta.wall_seconds, {"values.raw", "policy.raw", "q.raw", "solve_meta.json"});

  std::cout << "lattice " << lattice.ni() << "x" << lattice.nj() << "x" << lattice.nk() << ", "
            << lattice.count(NodeStatus::valid) << " solved nodes, " << lattice.total_actions() << " actions; "
            << sol.iterations << " sweeps, residual " << (sol.residuals.empty() ? 0.0 : sol.residuals.back()) << "\n";
  if (!sol.converged) {
    std::cerr << "error: value iteration did not converge within " << cfg.max_iters << " sweeps (partial results written)\n";
    return 3;
  }
  return 0;
}

struct RolloutArgs {
  std::string grid, scenario, solution, policy, out;
  int n = 500;
  std::uint64_t seed = 0;
  double timeout = 7'776'000.0;
  double subsample = 0.2;
  int threads = 0;
};

int cmd_rollout(const RolloutArgs& a) {
  const auto t0 = Clock::now();
  const PolicySpec spec = parse_policy(a.policy);
  const Loaded in = load_inputs(a.grid, a.scenario);

  std::optional<SolveMeta> meta;
  double subsample = a.subsample;
  if (spec.needs_solution()) {
    if (a.solution.empty()) throw ConfigError("policy '" + a.policy + "' needs --solution");
    meta = read_solve_meta(a.solution);
    subsample = meta->subsample;
  }
  const CavityMdp mdp = make_cavity_mdp(in.grid, in.scenario.terminals, in.scenario.mdp, subsample);
  std::optional<LatticeSpec> lattice;
  std::optional<LoadedSolution> solved;
  if (meta) {
    lattice = build_lattice(mdp, meta->strides);
    solved = read_solution_archive(a.solution, *lattice);
  }
  const Policy policy(spec, mdp, lattice ? &*lattice : nullptr, solved ? &solved->solution : nullptr);

  RolloutConfig cfg;
  cfg.n_rollouts = a.n;
  cfg.start = in.scenario.start;
  cfg.timeout = a.timeout;
  cfg.seed = a.seed;
  cfg.success_label = in.scenario.success_label;
  cfg.threads = resolve_threads(a.threads);
  const GroundTruthFlow truth(in.grid);
  const auto records = run_rollouts(truth, mdp, policy, cfg);
  const RolloutStats stats = summarize(spec.to_string(), records, cfg.success_label);
  export_rollouts(records, stats, a.out);

  json inputs = input_hashes(in, a.scenario);
  inputs["policy"] = spec.to_string();
  inputs["seed"] = a.seed;
  inputs["n"] = a.n;
  inputs["timeout"] = a.timeout;
  if (meta) inputs["solution"] = meta->config_hash;
  write_run_manifest(a.out, "rollout", inputs, seconds_since(t0), {"trajectories.csv", "outcomes.csv", "stats.json"});
  std::cout << stats.policy << ": " << stats.successes << "/" << stats.n << " reached " << cfg.success_label
            << ", median " << format_double(stats.median_hours) << " h\n";
  return 0;
}

std::string fixed1(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// RFC 4180 field quoting.
std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  if (a.inputs.empty()) throw ConfigError("report needs at least one --in directory");
  std::string table = "policy,reached_pct,median_h,std_h\n";
  for (const auto& dir : a.inputs) {
    const RolloutStats s = stats_from_json(read_json_file(fs::path(dir) / "stats.json"));
    table += csv_field(s.policy) + "," + fixed1(100.0 * s.success_fraction) + "," + fixed1(s.median_hours) + "," +
             fixed1(s.std_hours) + "\n";
  }
  if (!a.out.empty()) {
    const fs::path out(a.out);
    if (out.has_parent_path()) make_dir(out.parent_path());
    write_text_file(out, table);
  }
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-control planning for buoyancy-driven vehicles in ice-shelf cavities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic cavity grid archive");
  s->add_option("--params", synth.params, "cavity parameter JSON")->required();
  s->add_option("--seed", synth.seed, "random seed")->required();
  s->add_option("--out", synth.out, "output directory")->required();

  SolveArgs solve;
  auto* v = app.add_subcommand("solve", "solve the planning MDP by value iteration");
  v->add_option("--grid", solve.grid, "grid archive directory (default: from the scenario)");
  v->add_option("--scenario", solve.scenario, "scenario JSON")->required();
  v->add_option("--stride", solve.stride, "lattice strides sx,sy,sz in metres")->capture_default_str();
  v->add_option("--subsample", solve.subsample, "fraction of time steps in the velocity distributions")
      ->capture_default_str();
  v->add_option("--tol", solve.tol, "sup-norm residual tolerance (default 1e-4 x |goal reward|)");
  v->add_option("--max-iters", solve.max_iters, "sweep limit")->capture_default_str();
  v->add_option("--threads", solve.threads, "worker cap (default: ICECAV_THREADS or all cores)");
  v->add_option("--out", solve.out, "output directory")->required();

  RolloutArgs roll;
  auto* r = app.add_subcommand("rollout", "Monte Carlo rollouts of one policy against ground-truth flow");
  r->add_option("--grid", roll.grid, "grid archive directory (default: from the scenario)");
  r->add_option("--scenario", roll.scenario, "scenario JSON")->required();
  r->add_option("--solution", roll.solution, "solution archive (mdp and qmdp policies)");
  r->add_option("--policy", roll.policy, "uncontrolled | constfrac:<f> | mdp | qmdp:<sx>,<sy>,<sz>,<Nb>")->required();
  r->add_option("--n", roll.n, "number of rollouts")->capture_default_str();
  r->add_option("--seed", roll.seed, "random seed")->required();
  r->add_option("--timeout", roll.timeout, "seconds before a rollout counts as lost")->capture_default_str();
  r->add_option("--subsample", roll.subsample, "planner subsample for policies without a solution")
      ->capture_default_str();
  r->add_option("--threads", roll.threads, "worker cap (default: ICECAV_THREADS or all cores)");
  r->add_option("--out", roll.out, "output directory")->required();

  ReportArgs report;
  auto* p = app.add_subcommand("report", "tabulate rollout statistics");
  p->add_option("--in", report.inputs, "rollout output directories, one row each")->required();
  p->add_option("--out", report.out, "also write the table to this CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*v) return cmd_solve(solve);
    if (*r) return cmd_rollout(roll);
    if (*p) return cmd_report(report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
