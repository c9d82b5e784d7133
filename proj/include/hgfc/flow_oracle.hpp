#ifndef HGFC_FLOW_ORACLE_HPP
#define HGFC_FLOW_ORACLE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hgfc/model.hpp"

namespace hgfc {

// Machine speed as a rational num/den; the offline benchmark runs at
// 1/(1+eps). Slot capacity becomes `num` work quanta of size delta/den.
struct Speed {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static Speed unit() { return {1, 1}; }
  // Approximates x by a rational with denominator <= max_den; throws
  // NonIntegralCapacity if no denominator within the bound matches.
  static Speed from_double(double x, std::int64_t max_den = 64);
  Speed reciprocal() const { return {den, num}; }
  double as_double() const { return double(num) / double(den); }
};

// Discretized job-slot bipartite network (single machine). Slots run over
// [start_slot, horizon_slot); edge (j, t) exists for t >= earliest_slot[j]
// and costs g_j(midpoint of t) per unit of work.
struct FlowNetwork {
  double delta = 1.0;
  std::int64_t start_slot = 0;
  std::int64_t horizon_slot = 0;
  Speed speed;                             // slot capacity = speed.num quanta
  std::vector<int> job_ids;
  std::vector<std::int64_t> supplies;      // work quanta of size delta/speed.den
  std::vector<std::int64_t> earliest_slot;
  std::vector<CostFunction> costs;         // per job, scaled g_j

  std::int64_t num_slots() const { return horizon_slot - start_slot; }
  double slot_mid(std::int64_t t) const { return (double(t) + 0.5) * delta; }
  double quantum_work() const { return delta / double(speed.den); }
  // Cost value g_j at the slot midpoint (dual units).
  double value_at(int j, std::int64_t t) const { return costs[j].value(slot_mid(t)); }
  // Cost of one quantum of job j's work placed in slot t.
  double quantum_cost(int j, std::int64_t t) const { return value_at(j, t) * quantum_work(); }
  double residual_work(int j) const { return double(supplies[j]) * quantum_work(); }
  bool unit_speed() const { return speed.num == 1 && speed.den == 1; }

  // Plain edge-list dump: "j t cost cap" per line.
  void dump(std::ostream& os) const;
};

// Identical-availability network over the alive jobs' residual lengths
// (all usable from state.time on). Machine 0 costs are used.
FlowNetwork build_rnf(const DiscreteInstance& inst, const RemainingState& state,
                      Speed speed = Speed::unit());

// Release-respecting offline network over the whole instance (machine 0).
FlowNetwork build_offline_network(const DiscreteInstance& inst, Speed speed = Speed::unit());

struct FlowSolution {
  double value = 0.0;
  std::vector<std::vector<std::int64_t>> flow;  // [job][slot - start] quanta

  // Unit-speed helper: job index per slot, -1 if idle.
  std::vector<int> assignment() const;
};

// Integral min-cost flow via successive shortest augmenting paths with
// potentials. `warm` may carry a flow that is optimal for its own supply
// vector (a subset of the network's supplies); the remaining supply is
// then routed along shortest paths only. Throws InfeasibleNetwork.
FlowSolution solve_min_cost(const FlowNetwork& net,
                            const FlowSolution* warm = nullptr);

// Dual variables for the slot LP: alpha_j / v_j(r_n) <= beta_t + g_j(t).
struct DualPotentials {
  std::vector<double> alpha;     // absolute alpha_j (per-unit value * residual)
  std::vector<double> per_unit;  // alpha_j / v_j(r_n)
  std::vector<double> beta;      // per slot, beta[t - start]
  std::int64_t start_slot = 0;
  double delta = 1.0;

  // sum alpha - (slot measure) * sum beta; equals the primal value.
  double objective(const FlowNetwork& net) const;
};

// Costate-style duals recovered from the optimal schedule's block structure,
// with handover constraints evaluated at the block boundaries. Reproduces
// the continuous value-function sensitivities on dominating families;
// complementary slackness and strong duality are exact by construction.
// Unit-speed networks only.
DualPotentials extract_duals(const FlowNetwork& net, const FlowSolution& sol);

// The optimal dual maximizing every beta_t pointwise (and hence the beta
// sum), computed as the greatest fixpoint of the tight-edge relaxation
// system (a Bellman sweep). Unit-speed networks only. Throws
// NonOptimalInput if `optimum_value` is not this network's optimum.
DualPotentials maximal_beta(const FlowNetwork& net, double optimum_value);
DualPotentials maximal_beta(const FlowNetwork& net, const FlowSolution& sol);

// Exhaustive slot-assignment oracle (single machine, releases respected).
// Throws TooLarge if the total work exceeds `max_work_slots`.
double brute_force_opt(const DiscreteInstance& inst, std::int64_t max_work_slots = 10);

}  // namespace hgfc

#endif
