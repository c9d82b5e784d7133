#ifndef HGFC_SINGLE_MACHINE_HPP
#define HGFC_SINGLE_MACHINE_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hgfc/duals.hpp"
#include "hgfc/flow_oracle.hpp"
#include "hgfc/model.hpp"

namespace hgfc {

// Densities and the shared core for instances with costs rho_j * g(t).
struct DensityView {
  CostFunction core;                // g with unit weight
  std::map<int, double> density;    // job id -> rho_j
};
DensityView common_core(const DiscreteInstance& inst);

// Highest density first at slot granularity; ties go to the lowest job id.
Schedule hdf_schedule(const DiscreteInstance& inst);

struct SubJob {
  int parent = 0;
  double start = 0.0;
  double length = 0.0;
  double density = 0.0;
};

// One subjob per maximal contiguous processing interval of the HDF run,
// ordered by interval.
struct SplitInstance {
  std::vector<SubJob> subjobs;
  CostFunction core;
  double makespan = 0.0;
};
SplitInstance split_instance(const Schedule& sched, const DiscreteInstance& inst);

// One piece of the beta curve: on [a, b), beta(t) = constant - rho * g(t).
struct BetaPiece {
  double a = 0.0;
  double b = 0.0;
  double rho = 0.0;
  double constant = 0.0;
};

struct StepSegment {
  int parent = 0;
  double a = 0.0;
  double b = 0.0;
  double height = 0.0;  // alpha_k / v_k
};

struct AlphaBetaPlots {
  std::vector<SubJob> subjobs;
  std::vector<StepSegment> steps;
  std::vector<BetaPiece> beta;
  std::map<int, double> reference_heights;  // filled by convert_duals
  CostFunction core;
  double makespan = 0.0;

  double beta_at(double t) const;
  double beta_integral() const;
  // sum of step areas minus the beta integral
  double dual_objective() const;
};

// Optimal split-instance duals in closed form; the dual objective equals the
// HDF cost.
AlphaBetaPlots split_duals(const SplitInstance& split);

struct ConversionStep {
  int subjob_index = 0;
  int parent = 0;
  double old_height = 0.0;
  double new_height = 0.0;
};

struct ConvertedDuals {
  std::map<int, double> alpha;    // alpha_j = h_j * v_j
  std::map<int, double> heights;  // h_j
  AlphaBetaPlots plots;           // updated steps and beta curve
  std::vector<ConversionStep> trace;
  double objective = 0.0;
};

// The backward dual update: walk the steps right to left, set each job's
// reference height from the first of its steps, lower later ones to it, and
// push every decrease into the steps and the beta curve to the left.
ConvertedDuals convert_duals(const AlphaBetaPlots& plots, const DiscreteInstance& inst);

// Smallest slack of h_j <= beta(t) + rho_j g(t) over t >= r_j, evaluated
// exactly on the piece boundaries (the per-piece objective is monotone).
double converted_min_slack(const ConvertedDuals& duals, const DiscreteInstance& inst);

// A job's planned processing intervals together with its cost.
struct JobIntervals {
  int job_id = 0;
  CostFunction cost;
  std::vector<Interval> intervals;
};

// Total variation of each alive job's cost over its future intervals: the
// analytical upper bound on the optimal beta duals.
double beta_hat_single(std::span<const JobIntervals> plan, double t);
// Exact integral of the curve over [from, infinity).
double beta_hat_integral(std::span<const JobIntervals> plan, double from);

struct ArrivalRecord {
  int job = 0;
  double r = 0.0;
  double delta_alg = 0.0;
  double alpha_new = 0.0;
  double beta_tail_increase = 0.0;      // optimal-dual tail, integral units
  double beta_hat_increase = 0.0;       // analytical-curve tail
  bool postponement_ok = true;          // slotwise shift of every alive job
  bool completion_postponement_ok = true;
};

struct SingleRunResult {
  Schedule schedule;
  DualSolution duals;  // committed optimal betas + alphas set per arrival
  std::vector<ArrivalRecord> ledger;
  double cost = 0.0;   // fractional cost of the executed schedule
  // Per-epoch plan snapshots for beta-hat curve exports: (start time, plan).
  std::vector<std::pair<double, std::vector<JobIntervals>>> epochs;
};

// The online engine: on each arrival re-solves the residual instance from
// the arrival time on, replaces the beta tail with the new maximal optimal
// dual, and sets the newcomer's alpha from it.
SingleRunResult online_single_run(const Instance& inst, double delta, bool warm_start = true);

}  // namespace hgfc

#endif
