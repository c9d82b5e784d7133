#ifndef HGFC_UNRELATED_HPP
#define HGFC_UNRELATED_HPP

#include <cstdint>
#include <vector>

#include "hgfc/duals.hpp"
#include "hgfc/flow_oracle.hpp"
#include "hgfc/model.hpp"

namespace hgfc {

struct MachinePiece {
  int job = 0;
  double a = 0.0;
  double b = 0.0;  // [a, b)
  CostFunction cost;
};

// One machine's committed history plus its current plan, as a sorted list of
// disjoint processing pieces. Everything stays on the slot grid.
struct MachineState {
  int machine = 0;
  double clock = 0.0;
  std::vector<MachinePiece> pieces;

  double makespan() const { return pieces.empty() ? clock : pieces.back().b; }
  // Sum of total variations of the alive jobs' costs over their future
  // pieces truncated at t.
  double beta_hat(double t) const;
  // Exact integral of the curve over [from, infinity).
  double beta_hat_integral(double from) const;
};

struct DispatchDecision {
  int machine = -1;
  double t_star = 0.0;
  double alpha_n = 0.0;
};

double beta_hat_machine(const MachineState& state, double t);

// argmin over machines and candidate times of (beta_hat + g_in(t) + d_in) *
// v_in; candidates are the slot grid points up to the machine makespan plus
// the post-makespan boundary. Ties: lowest machine id, then earliest time.
DispatchDecision dispatch(const std::vector<MachineState>& machines, double release,
                          const std::vector<double>& lengths,
                          const std::vector<CostFunction>& costs, const std::vector<double>& d,
                          double delta);

// Occupies [t_star, t_star + length) with the new job and shifts every piece
// fragment at or after t_star right by the length. Throws OffGrid when
// t_star is below the clock or off the slot grid / plan breakpoints.
void insert_job(MachineState& state, int job_id, const CostFunction& cost, double length,
                double t_star, double delta);

struct UnrelatedArrivalRecord {
  int job = 0;
  int machine = 0;
  double t_star = 0.0;
  double alpha_n = 0.0;
  double delta_alg = 0.0;
  double theta_audit = 0.0;    // delta_alg / alpha_n
  double beta_increase = 0.0;  // integral of (beta_hat' - beta_hat)
  double k_audit = 0.0;        // beta_increase / delta_alg
};

struct UnrelatedRunResult {
  Schedule schedule;
  DualSolution duals;
  std::vector<UnrelatedArrivalRecord> ledger;
  std::vector<MachineState> machines;
  double cost = 0.0;              // exact interval integral of the schedule
  double insertion_cost = 0.0;    // sum of ledger delta_alg values
};

// Dispatch-and-insert online algorithm: per arrival picks the machine and
// insertion point minimizing the dual-feasible alpha, inserts, and replaces
// only that machine's beta-hat tail. Requires convex nondecreasing costs
// with g(r_j) = 0 (throws NonConvexCost otherwise).
UnrelatedRunResult online_unrelated_run(const Instance& inst, double delta);

// Discretized transportation LP: min sum (g_ij(t) + d_ij) x_ij(t) subject to
// full fractional processing of every job and per-(machine, slot) capacity
// speed * delta. Its value is at most twice the fractional cost of any
// feasible schedule.
double lp_lower_bound(const DiscreteInstance& inst, Speed speed = Speed::unit());

}  // namespace hgfc

#endif
