#include "icecav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "icecav/error.hpp"
#include "icecav/parallel.hpp"
#include "icecav/raw_io.hpp"

namespace icecav {

namespace {

constexpr std::uint64_t kStartTag = 0x7374617274ULL;    // "start"
constexpr std::uint64_t kRolloutTag = 0x726f6c6cULL;    // "roll"
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double json_number(const nlohmann::json& v) { return v.is_null() ? kNaN : v.get<double>(); }
nlohmann::json number_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

void RolloutConfig::validate(const CavityMdp& mdp) const {
  if (n_rollouts < 1) throw ConfigError("rollout count must be >= 1");
  if (!(timeout > mdp.config.delta)) throw ConfigError("rollout timeout must exceed the planning step");
  if (!is_valid_state(mdp, start)) throw ConfigError("rollout start state is not a valid state");
}

double rollout_start_time(const GroundTruthFlow& truth, std::uint64_t seed, int index) {
  const GridSpec& g = truth.grid().spec();
  Rng rng(stream_seed(seed, kStartTag, static_cast<std::uint64_t>(index)));
  std::uniform_int_distribution<int> pick(0, g.nt - 1);
  return g.time(pick(rng));
}

RolloutRecord run_rollout(const GroundTruthFlow& truth, const CavityMdp& mdp, const Policy& policy,
                          const RolloutConfig& config, int index) {
  config.validate(mdp);
  RolloutRecord rec;
  rec.index = index;
  rec.start_time = rollout_start_time(truth, config.seed, index);
  Rng rng(stream_seed(config.seed, kRolloutTag, static_cast<std::uint64_t>(index)));
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec3 sigma = policy.observation_sigma();
  const double delta = mdp.config.delta;

  Vec3 s = config.start;
  Outcome outcome = classify_terminal(mdp, s);
  long n = 0;
  double step_rewards = 0.0;
  while (!outcome.is_terminal()) {
    const double t = static_cast<double>(n) * delta;
    if (t >= config.timeout) break;
    const double ox = normal(rng), oy = normal(rng), oz = normal(rng);
    const Vec3 observed{s.x + sigma.x * ox, s.y + sigma.y * oy, s.z + sigma.z * oz};
    double a = s.z;
    try {
      a = policy.action(s, observed, rng);
    } catch (const DomainError&) {
      // No usable policy information near s: hold depth.
    }
    a = action_set(mdp, s).clip(a);
    const Vec3 v = truth.velocity(s, rec.start_time + t);
    rec.steps.push_back({t, s, observed, a});
    step_rewards += reward(mdp, s, a);
    s = displaced(s, a, v, delta);
    outcome = classify_terminal(mdp, s);
    ++n;
  }
  rec.final_state = s;
  rec.elapsed = static_cast<double>(n) * delta;
  rec.energy = -step_rewards;
  if (outcome.is_terminal()) {
    rec.outcome = outcome.label;
    rec.cumulative_reward = step_rewards + outcome.reward;
  } else {
    rec.outcome = "timeout";
    rec.cumulative_reward = step_rewards;
  }
  return rec;
}

std::vector<RolloutRecord> run_rollouts(const GroundTruthFlow& truth, const CavityMdp& mdp, const Policy& policy,
                                        const RolloutConfig& config) {
  config.validate(mdp);
  std::vector<RolloutRecord> out(config.n_rollouts);
  parallel_for(out.size(), config.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = run_rollout(truth, mdp, policy, config, static_cast<int>(i));
  });
  return out;
}

RolloutStats summarize(const std::string& policy, const std::vector<RolloutRecord>& records,
                       const std::string& success_label) {
  RolloutStats st;
  st.policy = policy;
  st.n = static_cast<int>(records.size());
  std::vector<double> hours;
  for (const auto& r : records) {
    if (r.outcome == success_label) hours.push_back(r.elapsed / 3600.0);
  }
  st.successes = static_cast<int>(hours.size());
  st.success_fraction = st.n > 0 ? static_cast<double>(st.successes) / st.n : 0.0;
  st.median_hours = kNaN;
  st.std_hours = kNaN;
  if (!hours.empty()) {
    std::sort(hours.begin(), hours.end());
    const std::size_t m = hours.size() / 2;
    st.median_hours = hours.size() % 2 ? hours[m] : 0.5 * (hours[m - 1] + hours[m]);
  }
  if (hours.size() >= 2) {
    double mean = 0.0;
    for (double h : hours) mean += h;
    mean /= static_cast<double>(hours.size());
    double ss = 0.0;
    for (double h : hours) ss += (h - mean) * (h - mean);
    st.std_hours = std::sqrt(ss / static_cast<double>(hours.size() - 1));
  }
  return st;
}

ExperimentResult run_experiment(const GroundTruthFlow& truth, const CavityMdp& mdp, const std::vector<Policy>& policies,
                                const RolloutConfig& config) {
  ExperimentResult res;
  for (const Policy& p : policies) {
    res.records.push_back(run_rollouts(truth, mdp, p, config));
    res.stats.push_back(summarize(p.spec().to_string(), res.records.back(), config.success_label));
  }
  return res;
}

nlohmann::json stats_to_json(const RolloutStats& s) {
  nlohmann::json j;
  j["policy"] = s.policy;
  j["n"] = s.n;
  j["successes"] = s.successes;
  j["success_fraction"] = s.success_fraction;
  j["median_hours"] = number_json(s.median_hours);
  j["std_hours"] = number_json(s.std_hours);
  return j;
}

RolloutStats stats_from_json(const nlohmann::json& doc) {
  try {
    RolloutStats s;
    s.policy = doc.at("policy").get<std::string>();
    s.n = doc.at("n").get<int>();
    s.successes = doc.at("successes").get<int>();
    s.success_fraction = doc.at("success_fraction").get<double>();
    s.median_hours = json_number(doc.at("median_hours"));
    s.std_hours = json_number(doc.at("std_hours"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("stats.json: ") + e.what());
  }
}

std::string trajectories_csv(const std::vector<RolloutRecord>& records) {
  std::string out = "rollout_id,t,x,y,z,action,outcome\n";
  for (const auto& r : records) {
    const std::string id = std::to_string(r.index);
    for (const auto& st : r.steps) {
      out += id;
      for (double v : {st.t, st.state.x, st.state.y, st.state.z, st.action}) {
        out += ',';
        out += format_double(v);
      }
      out += ',';
      out += r.outcome;
      out += '\n';
    }
  }
  return out;
}

std::string outcomes_csv(const std::vector<RolloutRecord>& records) {
  std::string out = "rollout_id,start_time,outcome,elapsed_s,final_x,final_y,final_z,cumulative_reward,energy\n";
  for (const auto& r : records) {
    out += std::to_string(r.index) + ',' + format_double(r.start_time) + ',' + r.outcome;
    for (double v : {r.elapsed, r.final_state.x, r.final_state.y, r.final_state.z, r.cumulative_reward, r.energy}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void export_rollouts(const std::vector<RolloutRecord>& records, const RolloutStats& stats,
                     const std::filesystem::path& dir) {
  if (records.empty()) throw ConfigError("export_rollouts: no records");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / "trajectories.csv", trajectories_csv(records));
  write_text_file(dir / "outcomes.csv", outcomes_csv(records));
  write_json_file(dir / "stats.json", stats_to_json(stats));
}

}  // namespace icecav
