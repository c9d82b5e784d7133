#include "hgfc/single_machine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hgfc {

namespace {

constexpr double kTol = 1e-9;

}  // namespace

DensityView common_core(const DiscreteInstance& inst) {
  if (inst.machines != 1) throw BadConfig("common_core: single machine only");
  if (inst.jobs.empty()) throw BadConfig("common_core: empty instance");
  DensityView view;
  const CostFunction& first = inst.jobs.front().costs[0];
  for (const auto& job : inst.jobs) {
    const CostFunction& c = job.costs[0];
    if (c.family != first.family || c.shift != first.shift)
      throw BadConfig("common_core: costs do not share one core function");
    switch (c.family) {
      case CostFamily::ScaledLinear:
      case CostFamily::ScaledLog:
        break;
      case CostFamily::ScaledPower:
        if (c.power != first.power)
          throw BadConfig("common_core: power exponents differ");
        break;
      default:
        throw BadConfig("common_core: only weighted linear/power/log cores supported");
    }
    view.density[job.id] = c.rho;
  }
  view.core = first.scaled_by(first.rho > 0 ? 1.0 / first.rho : 0.0);
  if (first.rho == 0) view.core = CostFunction::scaled_linear(0.0, first.shift);
  return view;
}

Schedule hdf_schedule(const DiscreteInstance& inst) {
  DensityView view = common_core(inst);
  Schedule sched;
  sched.delta = inst.delta;
  sched.slots.assign(1, std::vector<int>(inst.horizon, -1));
  std::map<int, std::int64_t> residual;
  std::vector<const DiscreteJob*> by_id;
  for (const auto& job : inst.jobs) {
    residual[job.id] = job.length_slots[0];
    by_id.push_back(&job);
  }
  std::sort(by_id.begin(), by_id.end(),
            [](const DiscreteJob* a, const DiscreteJob* b) { return a->id < b->id; });
  for (std::int64_t t = 0; t < inst.horizon; ++t) {
    int pick = -1;
    double best = -1.0;
    for (const DiscreteJob* job : by_id) {
      if (job->release_slot > t || residual[job->id] == 0) continue;
      double rho = view.density[job->id];
      if (rho > best) {  // strict: the lowest id wins ties
        best = rho;
        pick = job->id;
      }
    }
    if (pick >= 0) {
      sched.slots[0][t] = pick;
      residual[pick]--;
    }
  }
  return sched;
}

SplitInstance split_instance(const Schedule& sched, const DiscreteInstance& inst) {
  DensityView view = common_core(inst);
  SplitInstance split;
  split.core = view.core;
  const auto& slots = sched.slots.at(0);
  for (size_t t = 0; t < slots.size(); ++t) {
    int job = slots[t];
    if (job < 0) continue;
    double begin = double(t) * sched.delta;
    double end = begin + sched.delta;
    if (!split.subjobs.empty() && split.subjobs.back().parent == job &&
        std::abs(split.subjobs.back().start + split.subjobs.back().length - begin) < kTol) {
      split.subjobs.back().length += sched.delta;
    } else {
      split.subjobs.push_back({job, begin, sched.delta, view.density[job]});
    }
    split.makespan = std::max(split.makespan, end);
  }
  return split;
}

double AlphaBetaPlots::beta_at(double t) const {
  for (const auto& p : beta)
    if (t >= p.a - kTol && t < p.b - kTol) return p.constant - p.rho * core.value(t);
  return 0.0;
}

double AlphaBetaPlots::beta_integral() const {
  double total = 0.0;
  for (const auto& p : beta)
    total += p.constant * (p.b - p.a) - p.rho * core.definite_integral(p.a, p.b);
  return total;
}

double AlphaBetaPlots::dual_objective() const {
  double alpha_sum = 0.0;
  for (const auto& s : steps) alpha_sum += s.height * (s.b - s.a);
  return alpha_sum - beta_integral();
}

AlphaBetaPlots split_duals(const SplitInstance& split) {
  AlphaBetaPlots plots;
  plots.subjobs = split.subjobs;
  plots.core = split.core;
  plots.makespan = split.makespan;
  const auto& subs = split.subjobs;
  const size_t n = subs.size();
  // tail sums S_k = sum_{j>k} rho_j (g(t_j + v_j) - g(t_j))
  std::vector<double> tail(n + 1, 0.0);
  for (size_t k = n; k-- > 0;) {
    double end = subs[k].start + subs[k].length;
    tail[k] = tail[k + 1] +
              subs[k].density * (split.core.value(end) - split.core.value(subs[k].start));
  }
  for (size_t k = 0; k < n; ++k) {
    double end = subs[k].start + subs[k].length;
    double constant = subs[k].density * split.core.value(end) + tail[k + 1];
    plots.beta.push_back({subs[k].start, end, subs[k].density, constant});
    // alpha_k / v_k = beta(t_k) + rho_k g(t_k) = constant
    plots.steps.push_back({subs[k].parent, subs[k].start, end, constant});
  }
  return plots;
}

namespace {

// min over t >= from of beta(t) + rho * g(t). On each piece the objective is
// constant + (rho - rho_piece) * g(t), monotone in t, so the piece endpoints
// carry the minimum; past the makespan beta = 0 and g is nondecreasing.
double min_shifted_beta(const AlphaBetaPlots& plots, double rho, double from) {
  const CostFunction& g = plots.core;
  double best = rho * g.value(std::max(from, plots.makespan));
  for (const auto& p : plots.beta) {
    if (p.b <= from + kTol) continue;
    double lo = std::max(p.a, from);
    for (double t : {lo, p.b}) {
      double val = p.constant - p.rho * g.value(t) + rho * g.value(t);
      best = std::min(best, val);
    }
  }
  return best;
}

}  // namespace

ConvertedDuals convert_duals(const AlphaBetaPlots& input, const DiscreteInstance& inst) {
  ConvertedDuals out;
  out.plots = input;
  auto& steps = out.plots.steps;
  auto& beta = out.plots.beta;
  const auto& subs = out.plots.subjobs;
  const size_t n = steps.size();

  for (size_t k = n; k-- > 0;) {
    int parent = subs[k].parent;
    double h;
    auto it = out.heights.find(parent);
    if (it == out.heights.end()) {
      h = min_shifted_beta(out.plots, subs[k].density, subs[k].start);
      out.heights[parent] = h;
    } else {
      h = it->second;
    }
    if (h < -kTol)
      throw NegativeHeight("reference height for job " + std::to_string(parent) +
                           " drops below zero");
    double delta = steps[k].height - h;
    if (delta < -kTol)
      throw NegativeHeight("step of job " + std::to_string(parent) +
                           " would need to be raised; backward update is inconsistent");
    out.trace.push_back({int(k), parent, steps[k].height, h});
    steps[k].height = h;
    if (delta <= 0) continue;
    double cutoff = steps[k].b;
    for (size_t m = 0; m < k; ++m) steps[m].height -= delta;
    for (auto& p : beta)
      if (p.b <= cutoff + kTol) p.constant -= delta;
  }
  for (const auto& s : steps)
    if (s.height < -kTol)
      throw NegativeHeight("a step was driven below zero during conversion");

  out.plots.reference_heights = out.heights;
  for (const auto& job : inst.jobs) {
    auto it = out.heights.find(job.id);
    if (it == out.heights.end()) continue;
    out.alpha[job.id] = it->second * double(job.length_slots[0]) * inst.delta;
  }
  double alpha_sum = 0.0;
  for (auto& [id, a] : out.alpha) alpha_sum += a;
  out.objective = alpha_sum - out.plots.beta_integral();
  return out;
}

double converted_min_slack(const ConvertedDuals& duals, const DiscreteInstance& inst) {
  DensityView view = common_core(inst);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& job : inst.jobs) {
    double release = double(job.release_slot) * inst.delta;
    double h = duals.heights.count(job.id) ? duals.heights.at(job.id) : 0.0;
    double best = min_shifted_beta(duals.plots, view.density[job.id], release);
    worst = std::min(worst, best - h);
  }
  return worst;
}

double beta_hat_single(std::span<const JobIntervals> plan, double t) {
  double total = 0.0;
  for (const auto& job : plan)
    for (const auto& iv : job.intervals) {
      if (iv.end <= t) continue;
      total += job.cost.value(iv.end) - job.cost.value(std::max(iv.begin, t));
    }
  return total;
}

double beta_hat_integral(std::span<const JobIntervals> plan, double from) {
  // integral over [from, inf) of sum of truncated total variations:
  // for a piece [a, b): (a - from)(g(b) - g(a)) + integral_a^b (g(b) - g(t)) dt
  double total = 0.0;
  for (const auto& job : plan)
    for (const auto& iv : job.intervals) {
      double a = std::max(iv.begin, from);
      double b = iv.end;
      if (b <= from) continue;
      const CostFunction& g = job.cost;
      total += (a - from) * (g.value(b) - g.value(a));
      total += g.value(b) * (b - a) - g.definite_integral(a, b);
    }
  return total;
}

namespace {

std::vector<JobIntervals> plan_intervals(const FlowNetwork& net, const FlowSolution& sol) {
  std::vector<JobIntervals> plan(net.job_ids.size());
  for (size_t j = 0; j < net.job_ids.size(); ++j) {
    plan[j].job_id = net.job_ids[j];
    plan[j].cost = net.costs[j];
  }
  auto assign = sol.assignment();
  for (size_t t = 0; t < assign.size(); ++t) {
    int j = assign[t];
    if (j < 0) continue;
    double begin = double(net.start_slot + std::int64_t(t)) * net.delta;
    double end = begin + net.delta;
    auto& ivs = plan[j].intervals;
    if (!ivs.empty() && std::abs(ivs.back().end - begin) < kTol)
      ivs.back().end = end;
    else
      ivs.push_back({begin, end});
  }
  return plan;
}

// k-th remaining planned slot of every alive job may only move right when a
// job is added; only the plan from the arrival slot on is compared (earlier
// slots of the old plan were already executed).
bool slotwise_postponed(const FlowNetwork& old_net, const FlowSolution& old_sol,
                        const FlowNetwork& new_net, const FlowSolution& new_sol,
                        std::int64_t from_slot) {
  auto slots_of = [from_slot](const FlowNetwork& net, const FlowSolution& sol, int job_id) {
    std::vector<std::int64_t> out;
    for (size_t j = 0; j < net.job_ids.size(); ++j) {
      if (net.job_ids[j] != job_id) continue;
      for (std::int64_t t = 0; t < std::int64_t(sol.flow[j].size()); ++t)
        if (sol.flow[j][t] > 0 && net.start_slot + t >= from_slot)
          out.push_back(net.start_slot + t);
    }
    return out;
  };
  for (int job_id : old_net.job_ids) {
    auto before = slots_of(old_net, old_sol, job_id);
    auto after = slots_of(new_net, new_sol, job_id);
    if (before.size() != after.size()) return false;
    for (size_t i = 0; i < before.size(); ++i)
      if (after[i] < before[i]) return false;
  }
  return true;
}

}  // namespace

SingleRunResult online_single_run(const Instance& inst, double delta, bool warm_start) {
  if (!inst.single_machine()) throw BadConfig("online_single_run: single machine only");
  DiscreteInstance dinst = discretize(inst, delta);

  std::vector<const DiscreteJob*> order;
  for (const auto& j : dinst.jobs) order.push_back(&j);
  std::stable_sort(order.begin(), order.end(), [](const DiscreteJob* a, const DiscreteJob* b) {
    if (a->release_slot != b->release_slot) return a->release_slot < b->release_slot;
    return a->id < b->id;
  });

  SingleRunResult result;
  result.schedule.delta = delta;
  result.schedule.slots.assign(1, {});
  result.duals.delta = delta;
  result.duals.beta.assign(1, {});

  std::map<int, std::int64_t> residual_slots;
  std::int64_t clock = order.empty() ? 0 : order.front()->release_slot;

  // Current plan for slots >= clock.
  FlowNetwork cur_net;
  FlowSolution cur_sol;
  std::vector<double> cur_beta;  // tail duals aligned with cur_net slots
  bool have_plan = false;

  auto& committed = result.schedule.slots[0];
  auto& committed_beta = result.duals.beta[0];
  auto commit_until = [&](std::int64_t until) {
    if (std::int64_t(committed.size()) < until) committed.resize(until, -1);
    if (std::int64_t(committed_beta.size()) < until) committed_beta.resize(until, 0.0);
    if (!have_plan) {
      clock = until;
      return;
    }
    auto assign = cur_sol.assignment();
    for (std::int64_t t = clock; t < until; ++t) {
      std::int64_t rel = t - cur_net.start_slot;
      int j = rel >= 0 && rel < std::int64_t(assign.size()) ? assign[rel] : -1;
      if (j >= 0) {
        int id = cur_net.job_ids[j];
        committed[t] = id;
        residual_slots[id]--;
        result.cost += dinst.slot_cost(0, dinst.job_by_id(id), t);
      }
      committed_beta[t] = rel >= 0 && rel < std::int64_t(cur_beta.size()) ? cur_beta[rel] : 0.0;
    }
    clock = until;
  };

  for (const DiscreteJob* job : order) {
    commit_until(std::max(clock, job->release_slot));
    std::int64_t r = clock;

    // Residual cost of the old plan from r on; by the principle of
    // optimality this is RNF(r) without re-solving.
    double rnf_old = 0.0;
    std::vector<JobIntervals> old_plan;
    if (have_plan) {
      auto assign = cur_sol.assignment();
      for (std::int64_t t = std::max<std::int64_t>(r, cur_net.start_slot);
           t < cur_net.horizon_slot; ++t) {
        int jj = assign[t - cur_net.start_slot];
        if (jj >= 0) rnf_old += cur_net.quantum_cost(jj, t);
      }
      old_plan = plan_intervals(cur_net, cur_sol);
      for (auto& ji : old_plan) {
        std::vector<Interval> trimmed;
        for (auto iv : ji.intervals) {
          iv.begin = std::max(iv.begin, double(r) * delta);
          if (iv.end > iv.begin + kTol) trimmed.push_back(iv);
        }
        ji.intervals = std::move(trimmed);
      }
    }

    RemainingState state;
    state.time = double(r) * delta;
    for (const auto& [id, slots] : residual_slots)
      if (slots > 0) state.residuals.emplace_back(id, double(slots) * delta);
    state.residuals.emplace_back(job->id, double(job->length_slots[0]) * delta);
    residual_slots[job->id] = job->length_slots[0];

    FlowNetwork net = build_rnf(dinst, state);
    FlowSolution warm;
    if (warm_start && have_plan) {
      warm.flow.assign(net.job_ids.size(), std::vector<std::int64_t>(net.num_slots(), 0));
      auto assign = cur_sol.assignment();
      for (std::int64_t t = std::max<std::int64_t>(r, cur_net.start_slot);
           t < cur_net.horizon_slot; ++t) {
        int jj = assign[t - cur_net.start_slot];
        if (jj < 0) continue;
        int id = cur_net.job_ids[jj];
        for (size_t nj = 0; nj < net.job_ids.size(); ++nj)
          if (net.job_ids[nj] == id) warm.flow[nj][t - net.start_slot] = 1;
      }
    }
    FlowSolution sol = solve_min_cost(net, warm_start && have_plan ? &warm : nullptr);
    DualPotentials duals = maximal_beta(net, sol);

    ArrivalRecord rec;
    rec.job = job->id;
    rec.r = double(r) * delta;
    rec.delta_alg = sol.value - rnf_old;
    for (size_t j = 0; j < net.job_ids.size(); ++j)
      if (net.job_ids[j] == job->id) rec.alpha_new = duals.alpha[j];

    // Optimal-dual tail increase, in integral units.
    double tail_inc = 0.0;
    for (std::int64_t t = net.start_slot; t < net.horizon_slot; ++t) {
      double old_b = 0.0;
      if (have_plan && t >= cur_net.start_slot &&
          t - cur_net.start_slot < std::int64_t(cur_beta.size()))
        old_b = cur_beta[t - cur_net.start_slot];
      tail_inc += (duals.beta[t - net.start_slot] - old_b) * delta;
    }
    rec.beta_tail_increase = tail_inc;

    auto new_plan = plan_intervals(net, sol);
    double from = double(r) * delta;
    rec.beta_hat_increase = beta_hat_integral(new_plan, from) - beta_hat_integral(old_plan, from);
    if (have_plan) {
      rec.postponement_ok = slotwise_postponed(cur_net, cur_sol, net, sol, r);
      rec.completion_postponement_ok = true;
      for (const auto& ji : old_plan) {
        if (ji.intervals.empty()) continue;
        double old_c = ji.intervals.back().end;
        for (const auto& nj : new_plan)
          if (nj.job_id == ji.job_id && !nj.intervals.empty() &&
              nj.intervals.back().end < old_c - kTol)
            rec.completion_postponement_ok = false;
      }
      if (!rec.completion_postponement_ok) rec.postponement_ok = false;
    }
    result.ledger.push_back(rec);
    result.duals.alpha[job->id] = rec.alpha_new;
    result.epochs.emplace_back(from, new_plan);

    cur_net = std::move(net);
    cur_sol = std::move(sol);
    cur_beta = std::move(duals.beta);
    have_plan = true;
  }

  if (have_plan) commit_until(cur_net.horizon_slot);
  return result;
}

}  // namespace hgfc
