#include "icecav/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "icecav/error.hpp"
#include "icecav/kernels.hpp"
#include "icecav/parallel.hpp"

namespace icecav {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RowBuffer {
  std::vector<double> reward, constant;
  std::vector<std::size_t> length;
  std::vector<std::int32_t> col;
  std::vector<double> weight;
};

// Dense scatter target plus the columns touched so far. IDW weights are strictly positive, so
// a zero slot is an untouched one.
struct Accumulator {
  std::vector<double> value;
  std::vector<std::int32_t> touched;

  explicit Accumulator(std::size_t n) : value(n, 0.0) {}

  void add(std::size_t n, double w) {
    if (value[n] == 0.0) touched.push_back(static_cast<std::int32_t>(n));
    value[n] += w;
  }

  void flush(RowBuffer& out, double scale) {
    std::sort(touched.begin(), touched.end());
    for (std::int32_t n : touched) {
      out.col.push_back(n);
      out.weight.push_back(value[n] * scale);
    }
    out.length.push_back(touched.size());
    for (std::int32_t n : touched) value[n] = 0.0;
    touched.clear();
  }
};

void build_rows(const CavityMdp& mdp, const LatticeSpec& lat, std::size_t begin, std::size_t end, RowBuffer& out) {
  const auto& k = kernels::active_kernels();
  Accumulator acc(lat.node_count());
  std::vector<double> fx, fy, fz, inv;
  std::vector<CellLocation> cells;
  for (std::size_t n = begin; n < end; ++n) {
    if (!lat.is_solved(n)) continue;
    const auto acts = lat.actions(n);
    if (acts.empty()) continue;
    const Vec3 s = lat.position(n);
    const EmpiricalVelocityDistribution dist = mdp.distributions(s);
    const std::size_t ns = dist.size();
    if (ns == 0) throw ConfigError("empty velocity distribution at lattice node " + std::to_string(n));
    const double scale = 1.0 / static_cast<double>(ns);
    fx.resize(ns);
    fy.resize(ns);
    fz.resize(ns);
    inv.resize(8 * ns);
    cells.resize(ns);
    for (int level : acts) {
      const double a = lat.level_z(level);
      double constant = 0.0;
      for (std::size_t q = 0; q < ns; ++q) {
        cells[q] = locate_cell(lat, displaced(s, a, dist.samples[q], mdp.config.delta));
        fx[q] = cells[q].fx;
        fy[q] = cells[q].fy;
        fz[q] = cells[q].fz;
      }
      k.inverse_distances(fx.data(), fy.data(), fz.data(), ns, inv.data());
      for (std::size_t q = 0; q < ns; ++q) {
        const Vec3 next = displaced(s, a, dist.samples[q], mdp.config.delta);
        const Outcome o = classify_terminal(mdp, next);
        if (o.is_terminal()) {
          constant += o.reward;
          continue;
        }
        const IdwWeights w = idw_from_inverse(lat, cells[q], inv.data() + q, ns);
        if (w.count == 0) {
          constant += mdp.config.r_infeasible;
          continue;
        }
        for (int m = 0; m < w.count; ++m) acc.add(w.node[m], w.weight[m]);
      }
      out.reward.push_back(reward(mdp, s, a));
      out.constant.push_back(constant * scale);
      acc.flush(out, scale);
    }
  }
}

double row_q(const TransitionKernel& tk, const kernels::KernelTable& k, std::size_t r, double gamma, const double* v) {
  const std::size_t b = tk.row_begin[r];
  const double ev = tk.constant[r] + k.gather_dot(tk.weight.data() + b, tk.col.data() + b, tk.row_begin[r + 1] - b, v);
  return tk.reward[r] + gamma * ev;
}

std::string describe_node(const LatticeSpec& lat, std::size_t n) {
  const auto [i, j, k] = lat.coords(n);
  return "node " + std::to_string(n) + " (" + std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) + ")";
}

}  // namespace

TransitionKernel build_transition_kernel(const CavityMdp& mdp, const LatticeSpec& lattice, int threads) {
  const std::size_t nodes = lattice.node_count();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::max(1, threads), nodes));
  const std::size_t chunk = (nodes + workers - 1) / workers;
  std::vector<RowBuffer> parts(workers);
  parallel_for(workers, static_cast<int>(workers), [&](std::size_t b, std::size_t e) {
    for (std::size_t w = b; w < e; ++w) {
      build_rows(mdp, lattice, std::min(nodes, w * chunk), std::min(nodes, (w + 1) * chunk), parts[w]);
    }
  });

  TransitionKernel tk;
  tk.row_begin.push_back(0);
  for (RowBuffer& p : parts) {
    tk.reward.insert(tk.reward.end(), p.reward.begin(), p.reward.end());
    tk.constant.insert(tk.constant.end(), p.constant.begin(), p.constant.end());
    tk.col.insert(tk.col.end(), p.col.begin(), p.col.end());
    tk.weight.insert(tk.weight.end(), p.weight.begin(), p.weight.end());
    for (std::size_t len : p.length) tk.row_begin.push_back(tk.row_begin.back() + len);
    p = RowBuffer{};
  }
  if (tk.rows() != lattice.total_actions()) throw NumericalError("transition kernel row count mismatch");
  return tk;
}

std::vector<double> initial_values(const CavityMdp& mdp, const LatticeSpec& lattice, double initial) {
  std::vector<double> v(lattice.node_count(), kNaN);
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (lattice.status(n) == NodeStatus::terminal) {
      v[n] = mdp.terminals[lattice.terminal_region(n)].reward;
    } else if (lattice.is_solved(n)) {
      v[n] = lattice.actions(n).empty() ? mdp.config.r_infeasible : initial;
    }
  }
  return v;
}

Backup bellman_backup(const CavityMdp& mdp, const LatticeSpec& lattice, std::span<const double> values, std::size_t node) {
  if (!lattice.is_solved(node)) throw DomainError("bellman_backup on an unsolved " + describe_node(lattice, node));
  const auto acts = lattice.actions(node);
  if (acts.empty()) return {mdp.config.r_infeasible, -1};
  const Vec3 s = lattice.position(node);
  const EmpiricalVelocityDistribution dist = mdp.distributions(s);
  Backup best{-std::numeric_limits<double>::infinity(), -1};
  for (std::size_t m = 0; m < acts.size(); ++m) {
    const double a = lattice.level_z(acts[m]);
    double sum = 0.0;
    for (const Vec3& v : dist.samples) {
      const StepResult r = step(mdp, s, a, v);
      sum += r.outcome.is_terminal() ? r.outcome.reward : interpolate_value(lattice, values, r.next, mdp.config.r_infeasible);
    }
    const double q = reward(mdp, s, a) + mdp.config.gamma * sum / static_cast<double>(dist.size());
    if (q > best.value) best = {q, static_cast<int>(m)};
  }
  return best;
}

void extract_policy(const CavityMdp& mdp, const LatticeSpec& lattice, const TransitionKernel& kernel, Solution& sol) {
  const auto& k = kernels::active_kernels();
  const std::size_t nodes = lattice.node_count();
  sol.q.assign(kernel.rows(), kNaN);
  sol.policy_depth.assign(nodes, kNaN);
  sol.policy_action.assign(nodes, -1);
  for (std::size_t n = 0; n < nodes; ++n) {
    if (!lattice.is_solved(n)) continue;
    const auto acts = lattice.actions(n);
    const std::size_t r0 = lattice.action_row(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < acts.size(); ++m) {
      const double q = row_q(kernel, k, r0 + m, mdp.config.gamma, sol.values.data());
      sol.q[r0 + m] = q;
      if (q > best) {
        best = q;
        sol.policy_action[n] = static_cast<std::int32_t>(m);
        sol.policy_depth[n] = lattice.level_z(acts[m]);
      }
    }
  }
}

Solution value_iteration(const CavityMdp& mdp, const LatticeSpec& lattice, const TransitionKernel& kernel,
                         const SolverConfig& config) {
  if (!(config.tolerance > 0) || !std::isfinite(config.tolerance)) throw ConfigError("solver tolerance must be > 0");
  if (config.max_iters < 1) throw ConfigError("solver max_iters must be >= 1");
  const auto& k = kernels::active_kernels();
  const double gamma = mdp.config.gamma;
  const std::size_t nodes = lattice.node_count();
  const int threads = std::max(1, config.threads);

  Solution sol;
  sol.values = initial_values(mdp, lattice, mdp.config.e_h / (1.0 - gamma));
  std::vector<double> next = sol.values;
  std::vector<std::size_t> solved;
  for (std::size_t n = 0; n < nodes; ++n) {
    if (lattice.is_solved(n) && !lattice.actions(n).empty()) solved.push_back(n);
  }

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, solved.size()));
  std::vector<double> part_residual(workers);
  std::vector<std::size_t> part_bad(workers);
  const std::size_t chunk = (solved.size() + workers - 1) / std::max<std::size_t>(1, workers);
  for (int it = 0; it < config.max_iters; ++it) {
    const double* v = sol.values.data();
    parallel_for(workers, static_cast<int>(workers), [&](std::size_t b, std::size_t e) {
      for (std::size_t w = b; w < e; ++w) {
        double res = 0.0;
        std::size_t bad = nodes;
        const std::size_t lo = std::min(solved.size(), w * chunk), hi = std::min(solved.size(), (w + 1) * chunk);
        for (std::size_t s = lo; s < hi; ++s) {
          const std::size_t n = solved[s];
          const std::size_t r0 = lattice.action_row(n), r1 = r0 + lattice.actions(n).size();
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t r = r0; r < r1; ++r) best = std::max(best, row_q(kernel, k, r, gamma, v));
          if (!std::isfinite(best) && bad == nodes) bad = n;
          next[n] = best;
          res = std::max(res, std::abs(best - v[n]));
        }
        part_residual[w] = res;
        part_bad[w] = bad;
      }
    });
    for (std::size_t bad : part_bad) {
      if (bad != nodes) throw NumericalError("non-finite value at " + describe_node(lattice, bad));
    }
    const double residual = *std::max_element(part_residual.begin(), part_residual.end());
    std::swap(sol.values, next);
    sol.residuals.push_back(residual);
    sol.iterations = it + 1;
    if (residual <= config.tolerance) {
      sol.converged = true;
      break;
    }
  }
  extract_policy(mdp, lattice, kernel, sol);
  return sol;
}

Solution value_iteration(const CavityMdp& mdp, const LatticeSpec& lattice, const SolverConfig& config) {
  return value_iteration(mdp, lattice, build_transition_kernel(mdp, lattice, config.threads), config);
}

bool accept_solved(const LatticeSpec& lattice, std::size_t n) { return lattice.is_solved(n); }

double policy_lookup(const CavityMdp& mdp, const LatticeSpec& lattice, const Solution& sol, const Vec3& s) {
  const ActionInterval interval = action_set(mdp, s);
  const std::size_t n = nearest_node(lattice, s, &accept_solved);
  if (n == lattice.node_count()) throw DomainError("no solved lattice node within one cell of the query point");
  const double depth = sol.policy_depth[n];
  return interval.clip(std::isnan(depth) ? s.z : depth);
}

}  // namespace icecav
