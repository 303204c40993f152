#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "icecav/error.hpp"
#include "icecav/simulator.hpp"

using namespace icecav;
using testing::rect;
using testing::terminal;

namespace {

// 12 x 5 columns of 1 km, 10 levels of 50 m from the surface; all water.
GridSpec sim_spec(int nt = 4) {
  GridSpec g;
  g.nx = 12;
  g.ny = 5;
  g.nz = 10;
  g.nt = nt;
  g.dx = g.dy = 1000;
  g.dz = 50;
  g.dt = 3600;
  g.z0 = -25;
  return g;
}

struct World {
  std::shared_ptr<FlowGrid> grid;
  CavityMdp mdp;
  GroundTruthFlow truth;

  World(std::shared_ptr<FlowGrid> g, double goal_x)
      : grid(g),
        mdp(make_cavity_mdp(g, {terminal("grounding_zone", 500, rect(goal_x, -1, 1e5, 1e5))}, MdpConfig{}, 1.0)),
        truth(g) {}
};

RolloutConfig config_at(Vec3 start, int n = 1) {
  RolloutConfig c;
  c.n_rollouts = n;
  c.start = start;
  c.seed = 42;
  return c;
}

RolloutRecord with_outcome(std::string outcome, double hours) {
  RolloutRecord r;
  r.outcome = std::move(outcome);
  r.elapsed = hours * 3600;
  return r;
}

}  // namespace

TEST_CASE("simulator: starting inside the terminal ends at t = 0") {
  const World w(testing::uniform_grid(sim_spec(), {0.1, 0, 0}), 500);
  const Policy hold(parse_policy("uncontrolled"), w.mdp);
  const RolloutRecord r = run_rollout(w.truth, w.mdp, hold, config_at({1000, 2000, -200}), 0);
  CHECK(r.outcome == "grounding_zone");
  CHECK(r.elapsed == 0);
  CHECK(r.steps.empty());
  CHECK(r.cumulative_reward == 500);
  CHECK(r.energy == 0);
}

TEST_CASE("simulator: uniform 0.1 m/s drift reaches a goal 3.6 km away in 10 steps") {
  const World w(testing::uniform_grid(sim_spec(), {0.1, 0, 0}), 4500);
  const Policy hold(parse_policy("uncontrolled"), w.mdp);
  const RolloutRecord r = run_rollout(w.truth, w.mdp, hold, config_at({1000, 2000, -200}), 0);
  CHECK(r.outcome == "grounding_zone");
  CHECK(r.steps.size() == 10);
  CHECK(r.elapsed == 36000);
  CHECK(r.final_state.x == doctest::Approx(4600).epsilon(1e-6));
  CHECK(r.final_state.z == -200);
  CHECK(r.energy == 10);
  CHECK(r.cumulative_reward == 490);
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    CHECK(r.steps[i].t == 3600.0 * i);
    CHECK(r.steps[i].observed == r.steps[i].state);
  }
}

TEST_CASE("simulator: still water times out") {
  const World w(testing::uniform_grid(sim_spec(), {0, 0, 0}), 9000);
  const Policy hold(parse_policy("uncontrolled"), w.mdp);
  RolloutConfig c = config_at({1000, 2000, -200});
  c.timeout = 10 * 3600;
  const RolloutRecord r = run_rollout(w.truth, w.mdp, hold, c, 0);
  CHECK(r.outcome == "timeout");
  CHECK(r.steps.size() == 10);
  CHECK(r.elapsed == 36000);
  CHECK(r.final_state == Vec3{1000, 2000, -200});
  CHECK(r.cumulative_reward == -10);
}

TEST_CASE("simulator: drifting out of the domain is infeasible") {
  const World w(testing::uniform_grid(sim_spec(), {-0.1, 0, 0}), 9000);
  const Policy hold(parse_policy("uncontrolled"), w.mdp);
  const RolloutRecord r = run_rollout(w.truth, w.mdp, hold, config_at({1000, 2000, -200}), 0);
  CHECK(r.outcome == "infeasible");
  CHECK(r.steps.size() == 3);
  CHECK(r.cumulative_reward == -3 + w.mdp.config.r_infeasible);
}

TEST_CASE("simulator: velocity comes from the ground truth at the rollout's own clock") {
  auto g = testing::uniform_grid(sim_spec(6), {0, 0, 0});
  const std::size_t per_step = g->u().data().size() / 6;
  for (int n = 0; n < 6; ++n)
    for (std::size_t c = 0; c < per_step; ++c) g->u().data()[c + per_step * n] = float(0.01 * (n + 1));
  const World w(g, 9000);
  const Policy hold(parse_policy("uncontrolled"), w.mdp);
  RolloutConfig c = config_at({1000, 2000, -200});
  for (int index = 0; index < 8; ++index) {
    const RolloutRecord r = run_rollout(w.truth, w.mdp, hold, c, index);
    REQUIRE(r.steps.size() >= 8);
    for (int s = 0; s < 7; ++s) {
      // Cyclic time: step s sees sample (n0 + s) mod 6.
      const int n = int(std::lround(r.start_time / 3600 + s)) % 6;
      const double dx = r.steps[s + 1].state.x - r.steps[s].state.x;
      CHECK(dx == doctest::Approx(float(0.01 * (n + 1)) * 3600.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("simulator: start times are paired across policies") {
  const World w(testing::uniform_grid(sim_spec(48), {0.1, 0, 0}), 9000);
  std::set<double> seen;
  for (int i = 0; i < 50; ++i) {
    const double t = rollout_start_time(w.truth, 7, i);
    CHECK(t == rollout_start_time(w.truth, 7, i));
    CHECK(t >= 0);
    CHECK(t <= w.grid->spec().t_end());
    CHECK(std::fmod(t, 3600.0) == 0);
    seen.insert(t);
  }
  CHECK(seen.size() > 10);
  const Policy hold(parse_policy("uncontrolled"), w.mdp), frac(parse_policy("constfrac:0.5"), w.mdp);
  const auto res = run_experiment(w.truth, w.mdp, {hold, frac}, config_at({1000, 2000, -200}, 20));
  for (int i = 0; i < 20; ++i) CHECK(res.records[0][i].start_time == res.records[1][i].start_time);
  CHECK(res.stats[0].policy == "uncontrolled");
  CHECK(res.stats[1].policy == "constfrac:0.5");
}

TEST_CASE("simulator: logged actions are admissible and energy adds up") {
  const World w(testing::uniform_grid(sim_spec(), {0.1, 0.01, 0}), 9000);
  const Policy frac(parse_policy("constfrac:0.1"), w.mdp);
  RolloutConfig c = config_at({1000, 2000, -450});
  const RolloutRecord r = run_rollout(w.truth, w.mdp, frac, c, 0);
  REQUIRE(r.steps.size() > 3);
  double energy = 0;
  for (const RolloutStep& s : r.steps) {
    CHECK(action_set(w.mdp, s.state).contains(s.action));
    energy -= reward(w.mdp, s.state, s.action);
  }
  CHECK(r.energy == doctest::Approx(energy));
  CHECK(r.energy > double(r.steps.size()));  // climbing costs pump energy
  // Target depth is 50 m below the surface; the climb takes two steps at 180 m per step.
  CHECK(r.steps[1].state.z == doctest::Approx(-270));
  CHECK(r.steps[3].state.z == doctest::Approx(-50));
}

TEST_CASE("simulator: rollouts do not depend on the thread count") {
  auto g = testing::uniform_grid(sim_spec(24), {0.1, 0.02, 0});
  for (std::size_t c = 0; c < g->v().data().size(); ++c) g->v().data()[c] = float(0.05 * std::sin(0.37 * double(c)));
  const World w(g, 8000);
  const Policy frac(parse_policy("constfrac:0.6"), w.mdp);
  RolloutConfig c = config_at({1000, 2000, -200}, 40);
  c.threads = 1;
  const auto a = run_rollouts(w.truth, w.mdp, frac, c);
  c.threads = 3;
  const auto b = run_rollouts(w.truth, w.mdp, frac, c);
  CHECK(trajectories_csv(a) == trajectories_csv(b));
  CHECK(outcomes_csv(a) == outcomes_csv(b));
  for (int i = 0; i < 40; ++i) CHECK(a[i].index == i);
}

TEST_CASE("simulator: configuration errors") {
  const World w(testing::uniform_grid(sim_spec(), {0.1, 0, 0}), 9000);
  RolloutConfig c = config_at({1000, 2000, -200});
  CHECK_NOTHROW(c.validate(w.mdp));
  c.n_rollouts = 0;
  CHECK_THROWS_AS(c.validate(w.mdp), ConfigError);
  c = config_at({1000, 2000, 10});
  CHECK_THROWS_AS(c.validate(w.mdp), ConfigError);
  c = config_at({1000, 2000, -200});
  c.timeout = 100;
  CHECK_THROWS_AS(c.validate(w.mdp), ConfigError);
}

TEST_CASE("stats: success fraction, median and sample spread") {
  const std::vector<RolloutRecord> recs{with_outcome("grounding_zone", 10), with_outcome("grounding_zone", 20),
                                        with_outcome("timeout", 2160)};
  const RolloutStats s = summarize("mdp", recs, "grounding_zone");
  CHECK(s.n == 3);
  CHECK(s.successes == 2);
  CHECK(s.success_fraction == doctest::Approx(2.0 / 3.0));
  CHECK(s.median_hours == 15);
  CHECK(s.std_hours == doctest::Approx(std::sqrt(50.0)));

  const RolloutStats one = summarize("x", {with_outcome("grounding_zone", 7), with_outcome("infeasible", 1)}, "grounding_zone");
  CHECK(one.median_hours == 7);
  CHECK(std::isnan(one.std_hours));
  const RolloutStats none = summarize("x", {with_outcome("timeout", 7)}, "grounding_zone");
  CHECK(none.success_fraction == 0);
  CHECK(std::isnan(none.median_hours));
  const RolloutStats odd = summarize(
      "x", {with_outcome("grounding_zone", 30), with_outcome("grounding_zone", 10), with_outcome("grounding_zone", 20)},
      "grounding_zone");
  CHECK(odd.median_hours == 20);
  CHECK(odd.std_hours == doctest::Approx(10));
}

TEST_CASE("stats: JSON round trip keeps missing values missing") {
  const RolloutStats s = summarize("qmdp:1000,1000,3,64", {with_outcome("grounding_zone", 7)}, "grounding_zone");
  const nlohmann::json j = stats_to_json(s);
  CHECK(j["std_hours"].is_null());
  const RolloutStats back = stats_from_json(j);
  CHECK(back.policy == s.policy);
  CHECK(back.median_hours == 7);
  CHECK(std::isnan(back.std_hours));
  CHECK_THROWS_AS(stats_from_json(nlohmann::json{{"policy", "x"}}), ConfigError);
}

TEST_CASE("export: one trajectory row per step, stable bytes") {
  const World w(testing::uniform_grid(sim_spec(), {-0.125, 0, 0}), 9000);
  const Policy hold(parse_policy("uncontrolled"), w.mdp);
  const std::vector<RolloutRecord> recs{run_rollout(w.truth, w.mdp, hold, config_at({1000, 2000, -200}), 0)};
  REQUIRE(recs[0].steps.size() == 3);
  const RolloutStats st = summarize("uncontrolled", recs, "grounding_zone");
  testing::TempDir a, b;
  export_rollouts(recs, st, a.path());
  export_rollouts(recs, st, b.path());
  const std::string traj = testing::slurp(a / "trajectories.csv");
  CHECK(traj.rfind("rollout_id,t,x,y,z,action,outcome\n", 0) == 0);
  CHECK(std::count(traj.begin(), traj.end(), '\n') == 4);
  CHECK(traj.find("0,3600,550,2000,-200,-200,infeasible\n") != std::string::npos);
  const std::string out = testing::slurp(a / "outcomes.csv");
  CHECK(std::count(out.begin(), out.end(), '\n') == 2);
  CHECK(out.rfind("rollout_id,start_time,outcome,elapsed_s,final_x,final_y,final_z,cumulative_reward,energy\n", 0) == 0);
  for (const char* f : {"trajectories.csv", "outcomes.csv", "stats.json"}) CHECK(testing::slurp(a / f) == testing::slurp(b / f));
  CHECK_THROWS_AS(export_rollouts({}, st, a.path()), ConfigError);
}
