#include "icecav/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "icecav/error.hpp"

namespace icecav {

void MdpConfig::validate() const {
  if (!(delta > 0)) throw ConfigError("mdp: delta must be > 0");
  if (!(gamma > 0 && gamma < 1)) throw ConfigError("mdp: gamma must be in (0, 1)");
  if (!(descent_rate_min < 0 && ascent_rate_max > 0)) {
    throw ConfigError("mdp: need descent_rate_min < 0 < ascent_rate_max");
  }
  if (!(e_h <= 0) || !(alpha_b <= 0)) throw ConfigError("mdp: e_h and alpha_b must be <= 0");
  if (!(r_infeasible < 0)) throw ConfigError("mdp: r_infeasible must be < 0");
  if (!std::isfinite(z_min)) throw ConfigError("mdp: z_min must be finite");
}

bool TerminalRegion::contains(const Vec3& p) const {
  if (z_range && (p.z < z_range->first || p.z > z_range->second)) return false;
  return footprint.contains(p.x, p.y);
}

void CavityMdp::validate() const {
  config.validate();
  if (!distributions) throw ConfigError("mdp: no distribution accessor");
  std::set<std::string> labels;
  for (const auto& t : terminals) {
    if (t.label.empty() || t.label == kInfeasibleLabel) throw ConfigError("terminal label '" + t.label + "' is reserved");
    if (!labels.insert(t.label).second) throw ConfigError("duplicate terminal label '" + t.label + "'");
    if (!std::isfinite(t.reward)) throw ConfigError("terminal '" + t.label + "' has a non-finite reward");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& v : t.footprint.vertices()) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
    if (xmax < envelope.x_lo() || xmin > envelope.x_hi() || ymax < envelope.y_lo() || ymin > envelope.y_hi()) {
      throw ConfigError("terminal '" + t.label + "' does not intersect the navigable domain");
    }
  }
}

double CavityMdp::max_terminal_reward() const {
  double r = 0.0;
  for (const auto& t : terminals) r = std::max(r, std::abs(t.reward));
  return std::max(r, std::abs(config.r_infeasible));
}

PlannerFlowModel::PlannerFlowModel(std::shared_ptr<const FlowGrid> grid, NavigableEnvelope envelope, double subsample)
    : grid_(std::move(grid)),
      envelope_(std::move(envelope)),
      stride_(subsample_stride(subsample)),
      steps_(retained_time_steps(grid_->spec(), subsample)) {}

EmpiricalVelocityDistribution PlannerFlowModel::distribution(const Vec3& p) const {
  if (!envelope_.contains(p)) throw DomainError("velocity distribution requested at a non-navigable point");
  EmpiricalVelocityDistribution d;
  d.samples.reserve(steps_.size());
  for (int n : steps_) d.samples.push_back(interpolate_velocity(*grid_, p, grid_->spec().time(n)));
  return d;
}

CavityMdp make_cavity_mdp(std::shared_ptr<const FlowGrid> grid, std::vector<TerminalRegion> terminals,
                          const MdpConfig& config, double subsample) {
  CavityMdp mdp;
  mdp.envelope = navigable_envelope(*grid);
  auto model = std::make_shared<PlannerFlowModel>(std::move(grid), mdp.envelope, subsample);
  mdp.distributions = [model](const Vec3& p) { return model->distribution(p); };
  mdp.terminals = std::move(terminals);
  mdp.config = config;
  mdp.validate();
  return mdp;
}

bool is_valid_state(const CavityMdp& mdp, const Vec3& s) {
  if (!(s.z > mdp.config.z_min)) return false;
  return mdp.envelope.at(s.x, s.y).contains(s.z);
}

double ActionInterval::clip(double a) const {
  if (a < lo) return lo;
  if (hi_open) {
    if (a >= hi) return std::nextafter(hi, -std::numeric_limits<double>::infinity());
  } else if (a > hi) {
    return hi;
  }
  return a;
}

ActionInterval action_set(const CavityMdp& mdp, const Vec3& s) {
  const ColumnBounds col = mdp.envelope.at(s.x, s.y);
  if (!(s.z > mdp.config.z_min) || !col.contains(s.z)) {
    throw DomainError("action set requested for an invalid state");
  }
  ActionInterval r;
  r.lo = std::max(s.z + mdp.config.max_descent(), col.floor);
  if (r.lo <= mdp.config.z_min) r.lo = std::nextafter(mdp.config.z_min, std::numeric_limits<double>::infinity());
  const double rate_hi = s.z + mdp.config.max_ascent();
  if (rate_hi <= col.ceiling) {
    r.hi = rate_hi;
    r.hi_open = true;
  } else {
    r.hi = col.ceiling;
    r.hi_open = false;
  }
  return r;
}

Outcome classify_terminal(const CavityMdp& mdp, const Vec3& s) {
  for (std::size_t i = 0; i < mdp.terminals.size(); ++i) {
    const auto& t = mdp.terminals[i];
    if (t.contains(s)) return {Outcome::Kind::terminal, static_cast<int>(i), t.label, t.reward};
  }
  if (!is_valid_state(mdp, s)) return {Outcome::Kind::infeasible, -1, kInfeasibleLabel, mdp.config.r_infeasible};
  return {};
}

StepResult step(const CavityMdp& mdp, const Vec3& s, double a, const Vec3& velocity) {
  if (!action_set(mdp, s).contains(a)) throw ActionError("action " + std::to_string(a) + " not admissible");
  StepResult r;
  r.next = displaced(s, a, velocity, mdp.config.delta);
  r.outcome = classify_terminal(mdp, r.next);
  return r;
}

double reward(const CavityMdp& mdp, const Vec3& s, double a) {
  return mdp.config.e_h + mdp.config.alpha_b * std::max(a - s.z, 0.0);
}

std::vector<SupportPoint> transition_support(const CavityMdp& mdp, const Vec3& s, double a) {
  const EmpiricalVelocityDistribution dist = mdp.distributions(s);
  std::vector<SupportPoint> out;
  for (const Vec3& v : dist.samples) {
    const Vec3 next = displaced(s, a, v, mdp.config.delta);
    auto it = std::find_if(out.begin(), out.end(), [&](const SupportPoint& p) { return p.next == next; });
    if (it == out.end()) {
      out.push_back({next, 1});
    } else {
      ++it->count;
    }
  }
  return out;
}

double transition_probability(const CavityMdp& mdp, const Vec3& s, double a, const Vec3& next) {
  if (next.z != a) return 0.0;
  const EmpiricalVelocityDistribution dist = mdp.distributions(s);
  if (dist.samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Vec3& v : dist.samples) {
    const Vec3 d = displaced(s, a, v, mdp.config.delta);
    if (d.x == next.x && d.y == next.y) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(dist.samples.size());
}

}  // namespace icecav
