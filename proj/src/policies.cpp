#include "icecav/policies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "icecav/error.hpp"
#include "icecav/raw_io.hpp"

namespace icecav {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("policy: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Used when the belief mean is not a valid state: the nearest node's action, unclipped.
double fallback_action(const CavityMdp& mdp, const LatticeSpec& lattice, const Solution& sol, const Vec3& mean) {
  if (is_valid_state(mdp, mean)) return mdp_action(mdp, lattice, sol, mean);
  const std::size_t n = nearest_node(lattice, mean, &accept_solved);
  if (n == lattice.node_count() || std::isnan(sol.policy_depth[n])) return mean.z;
  return sol.policy_depth[n];
}

}  // namespace

void Belief::validate() const {
  if (!(sigma.x >= 0 && sigma.y >= 0 && sigma.z >= 0)) throw ConfigError("belief sigmas must be >= 0");
  if (samples < 1) throw ConfigError("belief sample budget must be >= 1");
  if (!std::isfinite(mean.x) || !std::isfinite(mean.y) || !std::isfinite(mean.z)) {
    throw ConfigError("belief mean must be finite");
  }
}

std::string PolicySpec::to_string() const {
  switch (kind) {
    case Kind::uncontrolled: return "uncontrolled";
    case Kind::constant_fraction: return "constfrac:" + format_double(fraction);
    case Kind::mdp: return "mdp";
    case Kind::qmdp:
      return "qmdp:" + format_double(sigma.x) + "," + format_double(sigma.y) + "," + format_double(sigma.z) + "," +
             std::to_string(belief_samples);
  }
  return {};
}

PolicySpec parse_policy(std::string_view text) {
  PolicySpec p;
  const std::size_t colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_args = colon != std::string_view::npos;
  if (head == "uncontrolled" && !has_args) {
    p.kind = PolicySpec::Kind::uncontrolled;
  } else if (head == "mdp" && !has_args) {
    p.kind = PolicySpec::Kind::mdp;
  } else if (head == "constfrac" && has_args) {
    p.kind = PolicySpec::Kind::constant_fraction;
    p.fraction = parse_number(args, "depth fraction");
    if (!(p.fraction > 0 && p.fraction < 1)) throw ConfigError("policy: constfrac fraction must be in (0, 1)");
  } else if (head == "qmdp" && has_args) {
    const auto parts = split(args, ',');
    if (parts.size() != 4) throw ConfigError("policy: expected qmdp:<sx>,<sy>,<sz>,<Nb>");
    p.kind = PolicySpec::Kind::qmdp;
    p.sigma = {parse_number(parts[0], "sigma_x"), parse_number(parts[1], "sigma_y"), parse_number(parts[2], "sigma_z")};
    const double nb = parse_number(parts[3], "sample budget");
    if (nb != std::floor(nb) || nb < 1 || nb > 1e6) throw ConfigError("policy: qmdp sample budget must be a positive integer");
    p.belief_samples = static_cast<int>(nb);
    Belief{{0, 0, 0}, p.sigma, p.belief_samples}.validate();
  } else {
    throw ConfigError("unknown policy '" + std::string(text) + "'");
  }
  return p;
}

double constant_fraction_action(const CavityMdp& mdp, const Vec3& s, double f) {
  const ColumnBounds col = mdp.envelope.at(s.x, s.y);
  if (!col.navigable) throw DomainError("constant-fraction policy queried over a non-navigable column");
  const double target = col.ceiling - f * (col.ceiling - col.floor);
  return action_set(mdp, s).clip(target);
}

double qmdp_action(const CavityMdp& mdp, const LatticeSpec& lattice, const Solution& sol, const Belief& belief, Rng& rng) {
  belief.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> nodes;
  nodes.reserve(belief.samples);
  const int budget = 10 * belief.samples;
  for (int attempt = 0; attempt < budget && static_cast<int>(nodes.size()) < belief.samples; ++attempt) {
    const double nx = normal(rng), ny = normal(rng), nz = normal(rng);
    const Vec3 p{belief.mean.x + belief.sigma.x * nx, belief.mean.y + belief.sigma.y * ny, belief.mean.z + belief.sigma.z * nz};
    if (!is_valid_state(mdp, p)) continue;
    const std::size_t n = nearest_node(lattice, p, &accept_solved);
    if (n == lattice.node_count() || lattice.actions(n).empty()) continue;
    nodes.push_back(n);
  }
  if (nodes.empty()) return fallback_action(mdp, lattice, sol, belief.mean);

  // Candidate levels admissible at every retained node.
  std::vector<int> candidates(lattice.actions(nodes.front()).begin(), lattice.actions(nodes.front()).end());
  std::sort(candidates.begin(), candidates.end());
  for (std::size_t q = 1; q < nodes.size() && !candidates.empty(); ++q) {
    std::vector<int> levels(lattice.actions(nodes[q]).begin(), lattice.actions(nodes[q]).end());
    std::sort(levels.begin(), levels.end());
    std::vector<int> both;
    std::set_intersection(candidates.begin(), candidates.end(), levels.begin(), levels.end(), std::back_inserter(both));
    candidates.swap(both);
  }
  if (candidates.empty()) return fallback_action(mdp, lattice, sol, belief.mean);

  std::size_t ref = nearest_node(lattice, belief.mean, &accept_solved);
  if (ref == lattice.node_count()) ref = nodes.front();
  const int k_ref = lattice.coords(ref)[2];
  std::stable_sort(candidates.begin(), candidates.end(), [k_ref](int a, int b) {
    const int da = k_ref - a, db = k_ref - b;
    if (std::abs(da) != std::abs(db)) return std::abs(da) < std::abs(db);
    return da < db;
  });

  double best = -std::numeric_limits<double>::infinity();
  int best_level = candidates.front();
  for (int level : candidates) {
    double sum = 0.0;
    for (std::size_t n : nodes) {
      const auto acts = lattice.actions(n);
      const std::size_t m = static_cast<std::size_t>(std::find(acts.begin(), acts.end(), level) - acts.begin());
      sum += sol.q[lattice.action_row(n) + m];
    }
    const double avg = sum / static_cast<double>(nodes.size());
    if (avg > best) {
      best = avg;
      best_level = level;
    }
  }
  const double depth = lattice.level_z(best_level);
  return is_valid_state(mdp, belief.mean) ? action_set(mdp, belief.mean).clip(depth) : depth;
}

Policy::Policy(PolicySpec spec, const CavityMdp& mdp, const LatticeSpec* lattice, const Solution* solution)
    : spec_(spec), mdp_(&mdp), lattice_(lattice), solution_(solution) {
  if (spec_.needs_solution() && (lattice_ == nullptr || solution_ == nullptr)) {
    throw ConfigError("policy '" + spec_.to_string() + "' needs a solution archive");
  }
}

Vec3 Policy::observation_sigma() const { return spec_.kind == PolicySpec::Kind::qmdp ? spec_.sigma : Vec3{0, 0, 0}; }

double Policy::action(const Vec3& truth, const Vec3& observed, Rng& rng) const {
  switch (spec_.kind) {
    case PolicySpec::Kind::uncontrolled: return uncontrolled_action(truth);
    case PolicySpec::Kind::constant_fraction: return constant_fraction_action(*mdp_, truth, spec_.fraction);
    case PolicySpec::Kind::mdp: return mdp_action(*mdp_, *lattice_, *solution_, truth);
    case PolicySpec::Kind::qmdp:
      return qmdp_action(*mdp_, *lattice_, *solution_, Belief{observed, spec_.sigma, spec_.belief_samples}, rng);
  }
  return truth.z;
}

}  // namespace icecav
