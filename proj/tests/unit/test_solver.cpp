#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "helpers.hpp"
#include "icecav/error.hpp"
#include "icecav/solver.hpp"
#include "oracle.hpp"

using namespace icecav;
using testing::box_envelope;
using testing::constant_distribution;
using testing::make_mdp;
using testing::rect;
using testing::terminal;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Six columns; one step of drift moves exactly one stride toward the terminal at x = 5000.
CavityMdp chain_mdp(MdpConfig cfg = {}) {
  return make_mdp(box_envelope(6, 3, 1000, -300, -100), constant_distribution({{1000.0 / 3600.0, 0, 0}}),
                  {terminal("grounding_zone", 100, rect(4500, -1, 1e4, 1e4))}, cfg);
}

}  // namespace

TEST_CASE("solver: still water converges to the discounted hotel load") {
  MdpConfig cfg;
  cfg.gamma = 0.9;
  const CavityMdp mdp = make_mdp(box_envelope(4, 3, 1000, -300, -100), constant_distribution({{0, 0, 0}}), {}, cfg);
  const LatticeSpec lat = build_lattice(mdp, {1000, 1000, 50});
  const Solution sol = value_iteration(mdp, lat, SolverConfig{1e-9, 100, 1});
  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    if (!lat.is_solved(n)) {
      CHECK(std::isnan(sol.values[n]));
      continue;
    }
    CHECK(sol.values[n] == doctest::Approx(cfg.e_h / (1 - cfg.gamma)).epsilon(1e-12));
    // Holding depth ties with free descents and wins as the first action.
    CHECK(sol.policy_action[n] == 0);
    CHECK(sol.policy_depth[n] == lat.position(n).z);
  }
}

TEST_CASE("solver: drift chain matches the closed form") {
  MdpConfig cfg;
  cfg.gamma = 0.9;
  const CavityMdp mdp = chain_mdp(cfg);
  const LatticeSpec lat = build_lattice(mdp, {1000, 1000, 50});
  const Solution sol = value_iteration(mdp, lat, SolverConfig{1e-12, 100, 1});
  CHECK(sol.converged);
  for (int i = 0; i < 5; ++i) {
    const int m = 5 - i;  // steps to the terminal
    const double expected = cfg.e_h * (1 - std::pow(cfg.gamma, m)) / (1 - cfg.gamma) + std::pow(cfg.gamma, m) * 100;
    for (int k = 0; k < lat.nk(); ++k) {
      const std::size_t n = lat.index(i, 1, k);
      REQUIRE(lat.is_solved(n));
      CHECK(sol.values[n] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK(sol.values[lat.index(5, 1, 2)] == 100);
}

TEST_CASE("solver: kernel rows of the chain") {
  const CavityMdp mdp = chain_mdp();
  const LatticeSpec lat = build_lattice(mdp, {1000, 1000, 50});
  const TransitionKernel tk = build_transition_kernel(mdp, lat);
  CHECK(tk.rows() == lat.total_actions());
  CHECK(tk.row_begin.size() == tk.rows() + 1);
  const std::size_t n = lat.index(2, 1, 2);
  const auto acts = lat.actions(n);
  for (std::size_t m = 0; m < acts.size(); ++m) {
    const std::size_t r = lat.action_row(n) + m;
    REQUIRE(tk.row_begin[r + 1] - tk.row_begin[r] == 1);
    CHECK(tk.col[tk.row_begin[r]] == std::int32_t(lat.index(3, 1, acts[m])));
    CHECK(tk.weight[tk.row_begin[r]] == 1.0);
    CHECK(tk.constant[r] == 0.0);
    CHECK(tk.reward[r] == reward(mdp, lat.position(n), lat.level_z(acts[m])));
  }
  const std::size_t last = lat.index(4, 1, 2);
  CHECK(tk.row_begin[lat.action_row(last) + 1] == tk.row_begin[lat.action_row(last)]);
  CHECK(tk.constant[lat.action_row(last)] == 100.0);
}

TEST_CASE("solver: kernel rows are sorted, positive and sub-stochastic") {
  const oracle::Problem p = oracle::random_problem(21);
  const TransitionKernel tk = build_transition_kernel(p.mdp, p.lattice);
  for (std::size_t r = 0; r < tk.rows(); ++r) {
    double sum = 0;
    for (std::size_t e = tk.row_begin[r]; e < tk.row_begin[r + 1]; ++e) {
      CHECK(tk.weight[e] > 0);
      if (e > tk.row_begin[r]) CHECK(tk.col[e] > tk.col[e - 1]);
      CHECK(p.lattice.is_vertex(std::size_t(tk.col[e])));
      sum += tk.weight[e];
    }
    CHECK(sum <= 1.0 + 1e-12);
  }
}

TEST_CASE("solver: action lists agree with the brute-force enumeration") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const oracle::Problem p = oracle::random_problem(seed);
    for (std::size_t n = 0; n < p.lattice.node_count(); ++n) {
      if (!p.lattice.is_solved(n)) continue;
      auto a = p.lattice.actions(n);
      std::vector<int> got(a.begin(), a.end());
      std::sort(got.begin(), got.end());
      CHECK(got == oracle::oracle_levels(p, n));
    }
  }
}

TEST_CASE("solver: finite-horizon values match the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const oracle::Problem p = oracle::random_problem(seed, 200, 8);
    const int sweeps = 25;
    const Solution sol = value_iteration(p.mdp, p.lattice, SolverConfig{1e-300, sweeps, 1});
    CHECK(sol.iterations == sweeps);
    CHECK_FALSE(sol.converged);
    const double v0 = p.mdp.config.e_h / (1 - p.mdp.config.gamma);
    CHECK(oracle::max_valid_diff(p, sol.values, oracle::oracle_values(p, sweeps, v0)) <= 1e-6);
  }
}

TEST_CASE("solver: compiled kernel agrees with the direct backup") {
  const oracle::Problem p = oracle::random_problem(7);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-500, 500);
  Solution sol;
  sol.values = initial_values(p.mdp, p.lattice, 0.0);
  for (std::size_t n = 0; n < sol.values.size(); ++n)
    if (p.lattice.is_solved(n)) sol.values[n] = u(rng);
  const TransitionKernel tk = build_transition_kernel(p.mdp, p.lattice);
  extract_policy(p.mdp, p.lattice, tk, sol);
  int checked = 0;
  for (std::size_t n = 0; n < p.lattice.node_count(); ++n) {
    if (!p.lattice.is_solved(n) || p.lattice.actions(n).empty()) continue;
    const Backup b = bellman_backup(p.mdp, p.lattice, sol.values, n);
    const double q = sol.q[p.lattice.action_row(n) + sol.policy_action[n]];
    CHECK(q == doctest::Approx(b.value).epsilon(1e-12));
    CHECK(sol.policy_action[n] == b.action);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("solver: residuals contract by gamma") {
  for (std::uint64_t seed = 11; seed <= 13; ++seed) {
    const oracle::Problem p = oracle::random_problem(seed);
    const Solution sol = value_iteration(p.mdp, p.lattice, SolverConfig{1e-8, 5000, 1});
    CHECK(sol.converged);
    for (std::size_t k = 1; k < sol.residuals.size(); ++k) {
      CHECK(sol.residuals[k] <= p.mdp.config.gamma * sol.residuals[k - 1] + 1e-9);
    }
  }
}

TEST_CASE("solver: results do not depend on the thread count") {
  const oracle::Problem p = oracle::random_problem(5);
  const TransitionKernel a = build_transition_kernel(p.mdp, p.lattice, 1);
  const TransitionKernel b = build_transition_kernel(p.mdp, p.lattice, 4);
  CHECK(same_bits(a.reward, b.reward));
  CHECK(same_bits(a.constant, b.constant));
  CHECK(same_bits(a.weight, b.weight));
  CHECK(a.col == b.col);
  CHECK(a.row_begin == b.row_begin);
  const Solution s1 = value_iteration(p.mdp, p.lattice, SolverConfig{1e-6, 5000, 1});
  const Solution s3 = value_iteration(p.mdp, p.lattice, SolverConfig{1e-6, 5000, 3});
  CHECK(same_bits(s1.values, s3.values));
  CHECK(same_bits(s1.policy_depth, s3.policy_depth));
  CHECK(s1.residuals == s3.residuals);
}

TEST_CASE("solver: scaling every reward by a positive factor keeps the policy") {
  oracle::Problem p = oracle::random_problem(9);
  const Solution base = value_iteration(p.mdp, p.lattice, SolverConfig{1e-9, 5000, 1});
  // A power of two scales every intermediate exactly.
  p.mdp.config.e_h *= 4;
  p.mdp.config.alpha_b *= 4;
  p.mdp.config.r_infeasible *= 4;
  for (auto& t : p.mdp.terminals) t.reward *= 4;
  const LatticeSpec lat = build_lattice(p.mdp, p.lattice.strides());
  const Solution scaled = value_iteration(p.mdp, lat, SolverConfig{4e-9, 5000, 1});
  CHECK(scaled.policy_action == base.policy_action);
  for (std::size_t n = 0; n < lat.node_count(); ++n) {
    if (lat.is_solved(n)) CHECK(scaled.values[n] == 4 * base.values[n]);
  }
}

TEST_CASE("solver: configuration and numerical errors") {
  const CavityMdp mdp = chain_mdp();
  const LatticeSpec lat = build_lattice(mdp, {1000, 1000, 50});
  CHECK_THROWS_AS(value_iteration(mdp, lat, SolverConfig{0.0, 10, 1}), ConfigError);
  CHECK_THROWS_AS(value_iteration(mdp, lat, SolverConfig{1.0, 0, 1}), ConfigError);

  const Solution partial = value_iteration(mdp, lat, SolverConfig{1e-300, 2, 1});
  CHECK_FALSE(partial.converged);
  CHECK(partial.iterations == 2);
  CHECK(partial.residuals.size() == 2);

  MdpConfig cfg;
  cfg.e_h = -1e308;  // V0 overflows to -inf
  const CavityMdp bad = chain_mdp(cfg);
  try {
    value_iteration(bad, build_lattice(bad, {1000, 1000, 50}), SolverConfig{1.0, 10, 1});
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("solver: policy lookup clips the nearest node's depth") {
  const CavityMdp mdp = chain_mdp();
  const LatticeSpec lat = build_lattice(mdp, {1000, 1000, 50});
  Solution sol;
  sol.policy_depth.assign(lat.node_count(), -300.0);
  // From -100 the deepest reachable depth is -280.
  CHECK(policy_lookup(mdp, lat, sol, {1000, 1000, -100}) == -280.0);
  CHECK(policy_lookup(mdp, lat, sol, {1000, 1000, -200}) == -300.0);
  sol.policy_depth.assign(lat.node_count(), std::nan(""));
  CHECK(policy_lookup(mdp, lat, sol, {1000, 1000, -200}) == -200.0);
  CHECK_THROWS_AS(policy_lookup(mdp, lat, sol, {-3000, 1000, -200}), DomainError);
}
