#include "hgfc/flow_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

namespace hgfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

}  // namespace

Speed Speed::from_double(double x, std::int64_t max_den) {
  if (x <= 0) throw NonIntegralCapacity("speed must be positive");
  for (std::int64_t den = 1; den <= max_den; ++den) {
    double num = x * double(den);
    if (std::abs(num - std::round(num)) < 1e-9) {
      std::int64_t n = std::int64_t(std::llround(num));
      std::int64_t g = gcd64(n, den);
      return {n / g, den / g};
    }
  }
  throw NonIntegralCapacity("speed has no rational form with denominator <= " +
                            std::to_string(max_den));
}

void FlowNetwork::dump(std::ostream& os) const {
  for (size_t j = 0; j < job_ids.size(); ++j)
    for (std::int64_t t = earliest_slot[j]; t < horizon_slot; ++t)
      os << job_ids[j] << ' ' << t << ' ' << quantum_cost(int(j), t) << ' ' << speed.num << '\n';
}

FlowNetwork build_rnf(const DiscreteInstance& inst, const RemainingState& state, Speed speed) {
  FlowNetwork net;
  net.delta = inst.delta;
  net.speed = speed;
  double q = inst.delta / double(speed.den);
  net.start_slot = std::int64_t(std::llround(state.time / inst.delta));
  std::int64_t total_quanta = 0;
  for (const auto& [id, residual] : state.residuals) {
    if (residual <= 0) throw BadConfig("build_rnf: residuals must be positive");
    double quanta = residual / q;
    if (std::abs(quanta - std::round(quanta)) > 1e-9)
      throw NonIntegralCapacity("residual length is not a multiple of the work quantum");
    const DiscreteJob& job = inst.job_by_id(id);
    net.job_ids.push_back(id);
    net.supplies.push_back(std::int64_t(std::llround(quanta)));
    net.earliest_slot.push_back(net.start_slot);
    net.costs.push_back(job.costs[0]);
    total_quanta += net.supplies.back();
  }
  net.horizon_slot = net.start_slot + (total_quanta + speed.num - 1) / speed.num;
  return net;
}

FlowNetwork build_offline_network(const DiscreteInstance& inst, Speed speed) {
  FlowNetwork net;
  net.delta = inst.delta;
  net.speed = speed;
  double q = inst.delta / double(speed.den);
  net.start_slot = 0;
  std::int64_t max_release = 0;
  std::int64_t total_quanta = 0;
  for (const auto& job : inst.jobs) {
    double quanta = double(job.length_slots[0]) * inst.delta / q;
    net.job_ids.push_back(job.id);
    net.supplies.push_back(std::int64_t(std::llround(quanta)));
    net.earliest_slot.push_back(job.release_slot);
    net.costs.push_back(job.costs[0]);
    max_release = std::max(max_release, job.release_slot);
    total_quanta += net.supplies.back();
  }
  net.horizon_slot = max_release + (total_quanta + speed.num - 1) / speed.num;
  return net;
}

std::vector<int> FlowSolution::assignment() const {
  std::vector<int> out;
  if (flow.empty()) return out;
  size_t slots = flow[0].size();
  out.assign(slots, -1);
  for (size_t t = 0; t < slots; ++t)
    for (size_t j = 0; j < flow.size(); ++j)
      if (flow[j][t] > 0) out[t] = int(j);
  return out;
}

// Successive shortest paths on the bipartite residual graph. Nodes are the
// jobs and the slots; the source/sink are implicit (job supplies, slot
// capacities). Shortest paths are found with SPFA since residual arcs can
// have negative reduced costs when warm-started.
FlowSolution solve_min_cost(const FlowNetwork& net, const FlowSolution* warm) {
  const int nj = int(net.job_ids.size());
  const std::int64_t T = net.num_slots();
  const std::int64_t cap = net.speed.num;

  std::vector<std::vector<std::int64_t>> flow(nj, std::vector<std::int64_t>(T, 0));
  std::vector<std::int64_t> remaining(net.supplies);
  std::vector<std::int64_t> slot_used(T, 0);
  double value = 0.0;

  if (warm) {
    for (int j = 0; j < nj; ++j) {
      if (j >= int(warm->flow.size())) break;
      for (std::int64_t t = 0; t < std::int64_t(warm->flow[j].size()) && t < T; ++t) {
        std::int64_t f = warm->flow[j][t];
        if (f == 0) continue;
        flow[j][t] = f;
        remaining[j] -= f;
        slot_used[t] += f;
        value += double(f) * net.quantum_cost(j, net.start_slot + t);
      }
    }
  }

  std::int64_t capacity_left = cap * T;
  for (std::int64_t u : slot_used) capacity_left -= u;
  std::int64_t demand = 0;
  for (std::int64_t r : remaining) demand += r;
  if (demand > capacity_left)
    throw InfeasibleNetwork("horizon too short for the total remaining work");

  // Node ids: 0..nj-1 jobs, nj..nj+T-1 slots.
  const int nodes = nj + int(T);
  std::vector<double> dist(nodes);
  std::vector<int> prev(nodes);
  std::vector<char> in_queue(nodes);

  for (int j = 0; j < nj; ++j) {
    while (remaining[j] > 0) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev.begin(), prev.end(), -1);
      std::fill(in_queue.begin(), in_queue.end(), 0);
      dist[j] = 0.0;
      std::deque<int> queue{j};
      in_queue[j] = 1;
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        in_queue[u] = 0;
        if (u < nj) {
          // forward arcs job u -> slot t
          for (std::int64_t t = net.earliest_slot[u] - net.start_slot; t < T; ++t) {
            if (flow[u][t] >= cap) continue;
            double nd = dist[u] + net.quantum_cost(u, net.start_slot + t);
            if (nd < dist[nj + t] - 1e-12 * (1.0 + std::abs(nd))) {
              dist[nj + t] = nd;
              prev[nj + t] = u;
              if (!in_queue[nj + t]) {
                queue.push_back(nj + int(t));
                in_queue[nj + t] = 1;
              }
            }
          }
        } else {
          // backward arcs slot -> job with positive flow
          std::int64_t t = u - nj;
          for (int k = 0; k < nj; ++k) {
            if (flow[k][t] <= 0) continue;
            double nd = dist[u] - net.quantum_cost(k, net.start_slot + t);
            if (nd < dist[k] - 1e-12 * (1.0 + std::abs(nd))) {
              dist[k] = nd;
              prev[k] = u;
              if (!in_queue[k]) {
                queue.push_back(k);
                in_queue[k] = 1;
              }
            }
          }
        }
      }
      // cheapest slot with free capacity reachable from j
      std::int64_t best = -1;
      double best_d = kInf;
      for (std::int64_t t = 0; t < T; ++t) {
        if (slot_used[t] >= cap) continue;
        if (dist[nj + t] < best_d) {
          best_d = dist[nj + t];
          best = t;
        }
      }
      if (best < 0) throw InfeasibleNetwork("no augmenting path for remaining work");

      // bottleneck along the alternating path
      std::int64_t push = remaining[j];
      push = std::min(push, cap - slot_used[best]);
      {
        int u = nj + int(best);
        while (prev[u] != -1) {
          int p = prev[u];
          if (u >= nj)
            push = std::min(push, cap - flow[p][u - nj]);
          else
            push = std::min(push, flow[u][p - nj]);
          u = p;
        }
      }
      // apply
      {
        int u = nj + int(best);
        while (prev[u] != -1) {
          int p = prev[u];
          if (u >= nj) {
            flow[p][u - nj] += push;
            value += double(push) * net.quantum_cost(p, net.start_slot + (u - nj));
          } else {
            flow[u][p - nj] -= push;
            value -= double(push) * net.quantum_cost(u, net.start_slot + (p - nj));
          }
          u = p;
        }
      }
      slot_used[best] += push;
      remaining[j] -= push;
    }
  }

  FlowSolution sol;
  sol.value = value;
  sol.flow = std::move(flow);
  return sol;
}

double DualPotentials::objective(const FlowNetwork& net) const {
  double a = 0.0;
  for (double x : alpha) a += x;
  double b = 0.0;
  for (double x : beta) b += x;
  double slot_measure = net.speed.as_double() * net.delta;
  return a - b * slot_measure;
}

namespace {

struct Block {
  int job = -1;
  std::int64_t begin = 0;  // slot indices, [begin, end)
  std::int64_t end = 0;
};

std::vector<Block> carried_blocks(const FlowNetwork& net, const FlowSolution& sol) {
  auto assign = sol.assignment();
  std::vector<Block> blocks;
  for (std::int64_t t = 0; t < std::int64_t(assign.size()); ++t) {
    int j = assign[t];
    if (j < 0) continue;
    if (!blocks.empty() && blocks.back().job == j && blocks.back().end == net.start_slot + t)
      blocks.back().end++;
    else
      blocks.push_back({j, net.start_slot + t, net.start_slot + t + 1});
  }
  return blocks;
}

void require_unit_speed(const FlowNetwork& net, const char* who) {
  if (!net.unit_speed())
    throw BadConfig(std::string(who) + ": dual extraction is defined for unit-speed networks");
}

DualPotentials duals_from_per_unit(const FlowNetwork& net, const FlowSolution& sol,
                                   std::vector<double> per_unit) {
  DualPotentials duals;
  duals.start_slot = net.start_slot;
  duals.delta = net.delta;
  duals.per_unit = std::move(per_unit);
  duals.alpha.resize(duals.per_unit.size());
  for (size_t j = 0; j < duals.per_unit.size(); ++j)
    duals.alpha[j] = duals.per_unit[j] * net.residual_work(int(j));
  auto assign = sol.assignment();
  duals.beta.assign(assign.size(), 0.0);
  for (size_t t = 0; t < assign.size(); ++t) {
    int j = assign[t];
    if (j < 0) continue;
    duals.beta[t] = duals.per_unit[j] - net.value_at(j, net.start_slot + std::int64_t(t));
  }
  return duals;
}

}  // namespace

DualPotentials extract_duals(const FlowNetwork& net, const FlowSolution& sol) {
  require_unit_speed(net, "extract_duals");
  auto blocks = carried_blocks(net, sol);
  const int nj = int(net.job_ids.size());
  std::vector<double> per_unit(nj, 0.0);
  std::vector<char> have(nj, 0);
  // Rightmost block first: the closing constraint binds at the boundary
  // after the job's final slot (beta = 0, monotone costs); interior
  // handovers bind where the costate curves touch.
  for (size_t b = blocks.size(); b-- > 0;) {
    int j = blocks[b].job;
    if (have[j]) continue;
    double boundary = double(blocks[b].end) * net.delta;
    if (b + 1 == blocks.size() || blocks[b].end < blocks[b + 1].begin) {
      // Last block, or an idle gap follows: the constraint closes against a
      // free slot where beta = 0.
      per_unit[j] = net.costs[j].value(boundary);
    } else {
      int k = blocks[b + 1].job;
      per_unit[j] = per_unit[k] + net.costs[j].value(boundary) - net.costs[k].value(boundary);
    }
    have[j] = 1;
  }
  return duals_from_per_unit(net, sol, std::move(per_unit));
}

DualPotentials maximal_beta(const FlowNetwork& net, const FlowSolution& sol) {
  require_unit_speed(net, "maximal_beta");
  const int nj = int(net.job_ids.size());
  auto assign = sol.assignment();
  const std::int64_t T = net.num_slots();

  // Every optimal dual satisfies y_j <= g_j(mid_t) for each free slot t
  // (beta_t = 0 there by complementary slackness); slots past the horizon
  // are always free and the cheapest of them is the first one.
  std::vector<double> cap(nj);
  for (int j = 0; j < nj; ++j) {
    cap[j] = net.value_at(j, net.horizon_slot);
    for (std::int64_t t = std::max<std::int64_t>(0, net.earliest_slot[j] - net.start_slot); t < T;
         ++t)
      if (assign[t] < 0) cap[j] = std::min(cap[j], net.value_at(j, net.start_slot + t));
  }
  // Greatest fixpoint of y_j <= y_k + g_j(mid_t) - g_k(mid_t) over carried
  // slots t with carrier k; a Bellman sweep on the job graph. Constraints
  // exist only for slots the job may use (t >= its earliest slot).
  std::vector<double> y(cap);
  const int max_passes = 3 * nj + 16;
  for (int pass = 0; pass <= max_passes; ++pass) {
    bool changed = false;
    for (std::int64_t t = 0; t < T; ++t) {
      int k = assign[t];
      if (k < 0) continue;
      double gk = net.value_at(k, net.start_slot + t);
      for (int j = 0; j < nj; ++j) {
        if (net.start_slot + t < net.earliest_slot[j]) continue;
        double bound = y[k] + net.value_at(j, net.start_slot + t) - gk;
        // scale-aware threshold: pure rounding noise must not count as progress
        if (bound < y[j] - 1e-12 * (1.0 + std::abs(y[j]))) {
          y[j] = bound;
          changed = true;
        }
      }
    }
    if (!changed) break;
    if (pass == max_passes)
      throw NonOptimalInput("maximal dual sweep failed to converge; flow is not optimal");
  }
  return duals_from_per_unit(net, sol, std::move(y));
}

DualPotentials maximal_beta(const FlowNetwork& net, double optimum_value) {
  FlowSolution sol = solve_min_cost(net);
  if (std::abs(sol.value - optimum_value) > 1e-9 * (1.0 + std::abs(sol.value)))
    throw NonOptimalInput("seed value has a duality gap beyond tolerance");
  return maximal_beta(net, sol);
}

double brute_force_opt(const DiscreteInstance& inst, std::int64_t max_work_slots) {
  if (inst.machines != 1) throw BadConfig("brute_force_opt: single machine only");
  std::int64_t work = inst.total_work_slots(0);
  if (work > max_work_slots)
    throw TooLarge("instance has " + std::to_string(work) + " work slots, cap is " +
                   std::to_string(max_work_slots));
  const int nj = int(inst.jobs.size());
  std::vector<std::int64_t> full(nj);
  for (int j = 0; j < nj; ++j) full[j] = inst.jobs[j].length_slots[0];

  // DP over (slot, residual vector); memo keyed by the residual counts.
  std::map<std::pair<std::int64_t, std::vector<std::int64_t>>, double> memo;
  auto rec = [&](auto&& self, std::int64_t t, std::vector<std::int64_t>& residual) -> double {
    bool done = std::all_of(residual.begin(), residual.end(), [](std::int64_t r) { return r == 0; });
    if (done) return 0.0;
    if (t >= inst.horizon) return kInf;
    auto key = std::make_pair(t, residual);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    double best = self(self, t + 1, residual);  // idle slot
    for (int j = 0; j < nj; ++j) {
      if (residual[j] == 0 || inst.jobs[j].release_slot > t) continue;
      residual[j]--;
      double sub = self(self, t + 1, residual);
      if (sub < kInf) best = std::min(best, inst.slot_cost(0, inst.jobs[j], t) + sub);
      residual[j]++;
    }
    memo[key] = best;
    return best;
  };
  std::vector<std::int64_t> residual(full);
  double best = rec(rec, 0, residual);
  if (best == kInf) throw InfeasibleNetwork("horizon too short for brute force");
  return best;
}

}  // namespace hgfc
