#ifndef HGFC_MODEL_HPP
#define HGFC_MODEL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hgfc/costfn.hpp"
#include "hgfc/errors.hpp"

namespace hgfc {

// One job; single-machine instances use one-element arrays. Cost functions
// are the length-scaled ones (weight / length), so the fractional objective
// is sum_j integral g_j(t) x_j(t) dt.
struct JobSpec {
  int id = 0;
  double release = 0.0;
  std::vector<double> lengths;      // v_ij > 0, one per machine
  std::vector<CostFunction> costs;  // scaled g_ij, one per machine
};

struct Instance {
  double delta = 1.0;
  int machines = 1;
  std::vector<JobSpec> jobs;

  void validate() const;  // throws BadConfig on structural problems
  bool single_machine() const { return machines == 1; }

  std::string to_json() const;
  static Instance from_json(const std::string& text);
  static Instance load(const std::string& path);
  void save(const std::string& path) const;
};

// Slot-indexed view: real time = slot * delta, slot t covers
// [t*delta, (t+1)*delta) and costs are evaluated at the slot midpoint.
struct DiscreteJob {
  int id = 0;
  std::int64_t release_slot = 0;
  std::vector<std::int64_t> length_slots;
  std::vector<CostFunction> costs;
};

struct DiscreteInstance {
  double delta = 1.0;
  int machines = 1;
  std::int64_t horizon = 0;  // number of slots
  std::vector<DiscreteJob> jobs;

  double slot_mid(std::int64_t t) const { return (double(t) + 0.5) * delta; }
  // Cost contribution of one slot of work on job j at machine i.
  double slot_cost(int machine, const DiscreteJob& j, std::int64_t t) const {
    return j.costs[machine].value(slot_mid(t)) * delta;
  }
  std::int64_t total_work_slots(int machine) const;
  const DiscreteJob& job_by_id(int id) const;
};

// Rejects non-commensurate data rather than rounding.
DiscreteInstance discretize(const Instance& inst, double delta);
inline DiscreteInstance discretize(const Instance& inst) { return discretize(inst, inst.delta); }

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

// Per-machine assignment of slots to jobs (-1 = idle). Nonmigratory: a job's
// slots must all live on one machine.
struct Schedule {
  double delta = 1.0;
  std::vector<std::vector<int>> slots;  // [machine][slot] -> job id or -1

  std::int64_t horizon() const { return slots.empty() ? 0 : std::int64_t(slots[0].size()); }
  // Union of half-open processing intervals of a job, in real time.
  std::vector<Interval> job_intervals(int job_id) const;
  // Machine a job ended up on, or -1 if never scheduled.
  int machine_of(int job_id) const;
  // Right boundary of the job's last slot, in real time.
  double completion_time(int job_id) const;
};

// Discrete Riemann sum of the LP objective (midpoint rule). Throws
// InfeasibleSchedule if slot counts, release constraints or the nonmigratory
// requirement are violated.
double fractional_cost(const Schedule& sched, const DiscreteInstance& inst);

// Integral objective sum_j v_j * g_j(C_j) with the scaled cost. Throws
// IncompleteSchedule if some job has unprocessed work.
double integral_cost(const Schedule& sched, const DiscreteInstance& inst);

// The same objective with exact per-interval antiderivatives instead of the
// midpoint sum; the two coincide for linear costs and differ by O(delta^2)
// per slot otherwise.
double exact_fractional_cost(const Schedule& sched, const DiscreteInstance& inst);

// Residual lengths at a common time point (identical-release subproblem).
struct RemainingState {
  double time = 0.0;
  std::vector<std::pair<int, double>> residuals;  // (job id, remaining length)
};

}  // namespace hgfc

#endif
