// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "icecav/error.hpp"
#include "icecav/grid_io.hpp"
#include "icecav/lattice.hpp"
#include "icecav/parallel.hpp"
#include "icecav/policies.hpp"
#include "icecav/raw_io.hpp"
#include "icecav/scenario.hpp"
#include "icecav/simulator.hpp"
#include "icecav/solver.hpp"
#include "icecav/synth.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace icecav;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kCavitySeed = 1;
constexpr std::uint64_t kRolloutSeed = 3;

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// The default synthetic cavity, solved once and shared by several criteria.
struct Cavity {
  CavityParams params;
  std::shared_ptr<FlowGrid> grid;
  Scenario scenario;
  CavityMdp mdp;
  LatticeSpec lattice;
  Solution solution;
  double solve_seconds = 0;
  int threads = 1;
};

Cavity& cavity() {
  static Cavity c = [] {
    Cavity c;
    c.params = cavity_params_from_json(read_json_file(fs::path(ICECAV_DATA_DIR) / "cavity.json"));
    c.grid = std::make_shared<FlowGrid>(synthesize_cavity(c.params, kCavitySeed));
    c.scenario = default_scenario(c.params);
    c.mdp = make_cavity_mdp(c.grid, c.scenario.terminals, c.scenario.mdp, 0.2);
    c.lattice = build_lattice(c.mdp, Strides{});
    c.threads = resolve_threads(0);
    const auto t0 = Clock::now();
    c.solution = value_iteration(c.mdp, c.lattice, SolverConfig{1e-2, 5000, c.threads});
    c.solve_seconds = seconds_since(t0);
    return c;
  }();
  return c;
}

void oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0;
  int max_nodes = 0, max_samples = 0;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const oracle::Problem p = oracle::random_problem(seed, 200, 8);
    max_nodes = std::max(max_nodes, int(p.lattice.node_count()));
    max_samples = std::max(max_samples, int(p.mdp.distributions(p.lattice.position(0)).size()));
    const Solution sol = value_iteration(p.mdp, p.lattice, SolverConfig{1e-10, 100000, 1});
    double vmax = 0;
    for (std::size_t n = 0; n < sol.values.size(); ++n)
      if (!std::isnan(sol.values[n])) vmax = std::max(vmax, std::abs(sol.values[n]));
    // Horizon with gamma^H |V|max < 1e-7, from zero values.
    const int horizon = int(std::ceil(std::log(1e-7 / (2 * vmax)) / std::log(p.mdp.config.gamma)));
    worst = std::max(worst, oracle::max_valid_diff(p, sol.values, oracle::oracle_values(p, horizon, 0.0)));
  }
  const double secs = seconds_since(t0);
  report(worst <= 1e-6 && secs < 10, "oracle equivalence",
         fmt("10 MDPs (<= %d nodes, <= %d samples): sup error %.2e (tol 1e-6), %.2f s (limit 10 s)", max_nodes,
             max_samples, worst, secs));
}

void contraction() {
  const Cavity& c = cavity();
  const auto& r = c.solution.residuals;
  const double gamma = c.mdp.config.gamma;
  std::size_t violations = 0;
  for (std::size_t k = 1; k < r.size(); ++k) violations += r[k] > gamma * r[k - 1] + 1e-9;
  const bool ok = violations == 0 && c.solution.converged && c.solve_seconds < 300;
  report(ok, "contraction",
         fmt("lattice %dx%dx%d, %zu solved nodes: %d sweeps to 1e-2, %zu violations, %.1f s on %d worker(s)",
             c.lattice.ni(), c.lattice.nj(), c.lattice.nk(), c.lattice.count(NodeStatus::valid), c.solution.iterations,
             violations, c.solve_seconds, c.threads));
}

void interpolation_weights() {
  const Cavity& c = cavity();
  const LatticeSpec& L = c.lattice;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(L.x_lo(), L.x_lo() + (L.ni() - 1) * L.strides().x);
  std::uniform_real_distribution<double> uy(L.y_lo(), L.y_lo() + (L.nj() - 1) * L.strides().y);
  std::uniform_real_distribution<double> uz(L.z_hi() - (L.nk() - 1) * L.strides().z, L.z_hi());
  int queried = 0, negative = 0;
  double worst = 0;
  while (queried < 10000) {
    const IdwWeights w = idw_weights(L, {ux(rng), uy(rng), uz(rng)});
    if (w.count == 0) continue;
    double sum = 0;
    for (int m = 0; m < w.count; ++m) {
      negative += w.weight[m] < 0;
      sum += w.weight[m];
    }
    worst = std::max(worst, std::abs(sum - 1));
    ++queried;
  }
  std::vector<double> values(L.node_count());
  std::uniform_real_distribution<double> uv(-1e4, 1e4);
  for (double& v : values) v = uv(rng);
  int coincident = 0, inexact = 0;
  for (std::size_t n = 0; n < L.node_count(); ++n) {
    if (!L.is_vertex(n)) continue;
    ++coincident;
    inexact += interpolate_value(L, values, L.position(n), std::nan("")) != values[n];
  }
  report(negative == 0 && worst <= 1e-12 && inexact == 0, "interpolation weights",
         fmt("%d points: max |sum - 1| = %.1e (tol 1e-12), %d negative; %d node queries, %d inexact", queried, worst,
             negative, coincident, inexact));
}

void transition_kernel() {
  // A short record keeps about a dozen velocity samples per node, so 1e5 draws resolve each
  // support point well inside the 1% budget.
  CavityParams p = cavity().params;
  p.nt = 60;
  auto grid = std::make_shared<FlowGrid>(synthesize_cavity(p, kCavitySeed));
  const Scenario sc = default_scenario(p);
  const CavityMdp mdp = make_cavity_mdp(grid, sc.terminals, sc.mdp, 0.2);
  const LatticeSpec L = build_lattice(mdp, Strides{});
  std::mt19937_64 rng(6);
  std::vector<std::size_t> nodes;
  for (std::size_t n = 0; n < L.node_count(); ++n)
    if (L.is_solved(n) && !L.actions(n).empty()) nodes.push_back(n);
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  double worst = 0;
  std::size_t support_max = 0;
  int pairs = 0;
  while (pairs < 100) {
    const std::size_t n = nodes[rng() % nodes.size()];
    const Vec3 s0 = L.position(n);
    const Vec3 s{s0.x + jitter(rng) * L.strides().x, s0.y + jitter(rng) * L.strides().y, s0.z};
    if (!is_valid_state(mdp, s)) continue;
    const ActionInterval A = action_set(mdp, s);
    const double a = A.clip(A.lo + (A.hi - A.lo) * std::uniform_real_distribution<double>(0, 1)(rng));
    const auto dist = mdp.distributions(s);
    std::map<std::tuple<double, double, double>, int> counts;
    std::uniform_int_distribution<std::size_t> pick(0, dist.size() - 1);
    constexpr int kDraws = 100000;
    for (int d = 0; d < kDraws; ++d) {
      const Vec3 next = step(mdp, s, a, dist.samples[pick(rng)]).next;
      ++counts[{next.x, next.y, next.z}];
    }
    double tv = 0, mass = 0;
    for (const auto& [key, cnt] : counts) {
      const auto [x, y, z] = key;
      const double prob = transition_probability(mdp, s, a, {x, y, z});
      tv += std::abs(double(cnt) / kDraws - prob);
      mass += prob;
    }
    // Support points never drawn contribute their whole probability.
    worst = std::max(worst, 0.5 * (tv + std::max(0.0, 1 - mass)));
    support_max = std::max(support_max, dist.size());
    ++pairs;
  }
  report(worst < 0.01, "transition kernel",
         fmt("%d (s,a) pairs x 1e5 draws, <= %zu samples per state: max TV %.4f (limit 0.01)", pairs, support_max,
             worst));
}

void qmdp_certainty() {
  const Cavity& c = cavity();
  const LatticeSpec& L = c.lattice;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(L.x_lo(), L.x_lo() + (L.ni() - 1) * L.strides().x);
  std::uniform_real_distribution<double> uy(L.y_lo(), L.y_lo() + (L.nj() - 1) * L.strides().y);
  std::uniform_real_distribution<double> uz(L.z_hi() - (L.nk() - 1) * L.strides().z, L.z_hi());
  int compared = 0, equal = 0;
  while (compared < 100) {
    const Vec3 s{ux(rng), uy(rng), uz(rng)};
    if (!is_valid_state(c.mdp, s) || classify_terminal(c.mdp, s).is_terminal()) continue;
    double expected = 0;
    try {
      expected = mdp_action(c.mdp, L, c.solution, s);
    } catch (const DomainError&) {
      continue;
    }
    Rng belief_rng(compared);
    equal += qmdp_action(c.mdp, L, c.solution, Belief{s, {0, 0, 0}, 64}, belief_rng) == expected;
    ++compared;
  }
  report(equal == compared, "QMDP certainty limit", fmt("%d/%d random valid states identical", equal, compared));
}

void policy_ordering() {
  const Cavity& c = cavity();
  const auto t0 = Clock::now();
  const GroundTruthFlow truth(c.grid);
  RolloutConfig cfg;
  cfg.n_rollouts = 500;
  cfg.start = c.scenario.start;
  cfg.seed = kRolloutSeed;
  cfg.success_label = c.scenario.success_label;
  cfg.threads = c.threads;
  std::vector<Policy> policies;
  for (const char* p : {"mdp", "qmdp:1000,1000,3,64", "constfrac:0.75", "uncontrolled"}) {
    policies.emplace_back(parse_policy(p), c.mdp, &c.lattice, &c.solution);
  }
  const ExperimentResult res = run_experiment(truth, c.mdp, policies, cfg);
  const double secs = seconds_since(t0);
  const auto& s = res.stats;
  const bool order = s[0].success_fraction >= s[1].success_fraction && s[1].success_fraction >= s[2].success_fraction &&
                     s[2].success_fraction >= s[3].success_fraction;
  const double gap = 100 * (s[0].success_fraction - s[3].success_fraction);
  const bool faster = s[0].median_hours <= s[2].median_hours;
  report(order && gap >= 20 && faster && secs < 600, "policy ordering",
         fmt("reached mdp %.1f%%, qmdp %.1f%%, constfrac %.1f%%, uncontrolled %.1f%% (gap %.1f pp, need 20); "
             "median h mdp %.1f vs constfrac %.1f; %.0f s",
             100 * s[0].success_fraction, 100 * s[1].success_fraction, 100 * s[2].success_fraction,
             100 * s[3].success_fraction, gap, s[0].median_hours, s[2].median_hours, secs));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ICECAV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / ("icecav_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  const fs::path grid = root / "grid", scenario = grid / "scenario.json";
  bool ok = run_cli("synth --params " + q(fs::path(ICECAV_DATA_DIR) / "cavity.json") + " --seed " +
                    std::to_string(kCavitySeed) + " --out " + q(grid)) == 0;
  std::vector<std::string> mismatched;
  const int thread_counts[] = {1, 3};
  std::map<std::string, std::string> first;
  for (int t : thread_counts) {
    const fs::path sol = root / ("solve_t" + std::to_string(t));
    ok = ok && run_cli("solve --scenario " + q(scenario) + " --tol 1e-2 --threads " + std::to_string(t) + " --out " + q(sol)) == 0;
    for (const char* policy : {"mdp", "qmdp:1000,1000,3,64"}) {
      const fs::path out = root / (std::string(policy).substr(0, 4) + "_t" + std::to_string(t));
      ok = ok && run_cli("rollout --scenario " + q(scenario) + " --solution " + q(sol) + " --policy " + policy +
                         " --n 100 --seed " + std::to_string(kRolloutSeed) + " --threads " + std::to_string(t) +
                         " --out " + q(out)) == 0;
      if (!ok) break;
      const std::string key = std::string(policy).substr(0, 4) + "/trajectories.csv";
      const std::string h = file_hash(out / "trajectories.csv");
      if (first.count(key) && first[key] != h) mismatched.push_back(key);
      first.emplace(key, h);
    }
    if (!ok) break;
    for (const char* f : {"values.raw", "policy.raw"}) {
      const std::string h = file_hash(sol / f);
      if (first.count(f) && first[f] != h) mismatched.push_back(f);
      first.emplace(f, h);
    }
  }
  fs::remove_all(root);
  std::string detail = ok ? "threads 1 vs 3: values.raw, policy.raw, trajectories.csv (mdp, qmdp) " : "CLI run failed ";
  detail += mismatched.empty() ? "identical" : "differ:";
  for (const auto& m : mismatched) detail += " " + m;
  report(ok && mismatched.empty(), "determinism", detail);
}

template <typename F>
void guarded(const char* name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(false, name, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded("oracle equivalence", oracle_equivalence);
  guarded("contraction", contraction);
  guarded("interpolation weights", interpolation_weights);
  guarded("transition kernel", transition_kernel);
  guarded("QMDP certainty limit", qmdp_certainty);
  guarded("policy ordering", policy_ordering);
  guarded("determinism", determinism);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
