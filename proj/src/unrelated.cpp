#include "hgfc/unrelated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgfc/costfn.hpp"
#include "hgfc/simplex.hpp"

namespace hgfc {

namespace {

constexpr double kTol = 1e-9;

bool on_grid(double t, double delta) {
  double q = t / delta;
  return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, std::abs(q));
}

}  // namespace

double MachineState::beta_hat(double t) const {
  double total = 0.0;
  for (const auto& p : pieces) {
    if (p.b <= t) continue;
    total += p.cost.value(p.b) - p.cost.value(std::max(p.a, t));
  }
  return total;
}

double MachineState::beta_hat_integral(double from) const {
  double total = 0.0;
  for (const auto& p : pieces) {
    if (p.b <= from) continue;
    double a = std::max(p.a, from);
    total += (a - from) * (p.cost.value(p.b) - p.cost.value(a));
    total += p.cost.value(p.b) * (p.b - a) - p.cost.definite_integral(a, p.b);
  }
  return total;
}

double beta_hat_machine(const MachineState& state, double t) { return state.beta_hat(t); }

DispatchDecision dispatch(const std::vector<MachineState>& machines, double release,
                          const std::vector<double>& lengths,
                          const std::vector<CostFunction>& costs, const std::vector<double>& d,
                          double delta) {
  DispatchDecision best;
  double best_val = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < machines.size(); ++i) {
    const MachineState& m = machines[i];
    double stop = std::max(m.makespan(), release);
    std::int64_t steps = std::int64_t(std::llround((stop - release) / delta));
    for (std::int64_t k = 0; k <= steps; ++k) {
      double t = release + double(k) * delta;
      double val = (m.beta_hat(t) + costs[i].value(t) + d[i]) * lengths[i];
      if (val < best_val - kTol) {
        best_val = val;
        best = {int(i), t, val};
      }
    }
  }
  return best;
}

void insert_job(MachineState& state, int job_id, const CostFunction& cost, double length,
                double t_star, double delta) {
  if (t_star < state.clock - kTol)
    throw OffGrid("insertion time is before the machine clock");
  bool aligned = on_grid(t_star, delta);
  for (const auto& p : state.pieces)
    if (std::abs(p.a - t_star) < kTol || std::abs(p.b - t_star) < kTol) aligned = true;
  if (!aligned) throw OffGrid("insertion time is neither a slot boundary nor a plan breakpoint");

  std::vector<MachinePiece> out;
  std::vector<MachinePiece> shifted;
  for (const auto& p : state.pieces) {
    if (p.b <= t_star + kTol) {
      out.push_back(p);
    } else if (p.a < t_star - kTol) {
      MachinePiece head = p, tail = p;
      head.b = t_star;
      tail.a = t_star + length;
      tail.b = p.b + length;
      out.push_back(head);
      shifted.push_back(tail);
    } else {
      MachinePiece tail = p;
      tail.a += length;
      tail.b += length;
      shifted.push_back(tail);
    }
  }
  out.push_back({job_id, t_star, t_star + length, cost});
  out.insert(out.end(), shifted.begin(), shifted.end());
  std::sort(out.begin(), out.end(),
            [](const MachinePiece& x, const MachinePiece& y) { return x.a < y.a; });
  state.pieces = std::move(out);
}

UnrelatedRunResult online_unrelated_run(const Instance& inst, double delta) {
  DiscreteInstance dinst = discretize(inst, delta);
  for (const auto& job : dinst.jobs)
    for (int i = 0; i < dinst.machines; ++i) {
      if (!job.costs[i].is_convex())
        throw NonConvexCost("job " + std::to_string(job.id) + " has a non-convex cost on machine " +
                            std::to_string(i));
      if (std::abs(job.costs[i].value(0.0)) > 1e-9)
        throw NonConvexCost("job " + std::to_string(job.id) + " has nonzero cost at time zero");
    }

  std::vector<const DiscreteJob*> order;
  for (const auto& j : dinst.jobs) order.push_back(&j);
  std::stable_sort(order.begin(), order.end(), [](const DiscreteJob* a, const DiscreteJob* b) {
    if (a->release_slot != b->release_slot) return a->release_slot < b->release_slot;
    return a->id < b->id;
  });

  UnrelatedRunResult result;
  result.machines.resize(dinst.machines);
  for (int i = 0; i < dinst.machines; ++i) result.machines[i].machine = i;
  result.duals.delta = delta;
  result.duals.beta.assign(dinst.machines, {});

  std::int64_t committed_to = 0;
  auto commit_beta = [&](std::int64_t until) {
    for (int i = 0; i < dinst.machines; ++i) {
      auto& bi = result.duals.beta[i];
      if (std::int64_t(bi.size()) < until) bi.resize(until, 0.0);
      for (std::int64_t t = committed_to; t < until; ++t)
        bi[t] = result.machines[i].beta_hat((double(t) + 0.5) * delta);
    }
    committed_to = until;
  };

  for (const DiscreteJob* job : order) {
    double r = double(job->release_slot) * delta;
    commit_beta(job->release_slot);
    for (auto& m : result.machines) m.clock = std::max(m.clock, r);

    std::vector<double> lengths(dinst.machines), dvals(dinst.machines);
    std::vector<CostFunction> costs(dinst.machines);
    for (int i = 0; i < dinst.machines; ++i) {
      lengths[i] = double(job->length_slots[i]) * delta;
      costs[i] = job->costs[i];
      dvals[i] = d_constant(costs[i], r, lengths[i]);
    }

    DispatchDecision pick = dispatch(result.machines, r, lengths, costs, dvals, delta);
    MachineState& target = result.machines[pick.machine];

    double v = lengths[pick.machine];
    const CostFunction& g = costs[pick.machine];
    // Closed-form cost increment: the new interval plus the shift penalty of
    // everything pushed right, without re-solving anything.
    double delta_alg = g.definite_integral(pick.t_star, pick.t_star + v);
    for (const auto& p : target.pieces) {
      if (p.b <= pick.t_star + kTol) continue;
      double a = std::max(p.a, pick.t_star);
      delta_alg += p.cost.definite_integral(a + v, p.b + v) - p.cost.definite_integral(a, p.b);
    }
    double before = target.beta_hat_integral(r);
    insert_job(target, job->id, g, v, pick.t_star, delta);
    double after = target.beta_hat_integral(r);

    UnrelatedArrivalRecord rec;
    rec.job = job->id;
    rec.machine = pick.machine;
    rec.t_star = pick.t_star;
    rec.alpha_n = pick.alpha_n;
    rec.delta_alg = delta_alg;
    rec.theta_audit = pick.alpha_n > 0 ? delta_alg / pick.alpha_n : 0.0;
    rec.beta_increase = after - before;
    rec.k_audit = delta_alg > kTol ? rec.beta_increase / delta_alg : 0.0;
    result.ledger.push_back(rec);
    result.insertion_cost += delta_alg;
    result.duals.alpha[job->id] = pick.alpha_n;
  }

  std::int64_t horizon = committed_to;
  for (const auto& m : result.machines)
    horizon = std::max(horizon, std::int64_t(std::llround(m.makespan() / delta)));
  commit_beta(horizon);

  result.schedule.delta = delta;
  result.schedule.slots.assign(dinst.machines, std::vector<int>(horizon, -1));
  for (int i = 0; i < dinst.machines; ++i)
    for (const auto& p : result.machines[i].pieces) {
      std::int64_t a = std::int64_t(std::llround(p.a / delta));
      std::int64_t b = std::int64_t(std::llround(p.b / delta));
      for (std::int64_t t = a; t < b; ++t) result.schedule.slots[i][t] = p.job;
      result.cost += p.cost.definite_integral(p.a, p.b);
    }
  return result;
}

double lp_lower_bound(const DiscreteInstance& inst, Speed speed) {
  const int m = inst.machines;
  const int n = int(inst.jobs.size());
  if (n == 0) return 0.0;
  std::int64_t max_release = 0;
  std::int64_t max_total = 0;
  for (int i = 0; i < m; ++i) max_total = std::max(max_total, inst.total_work_slots(i));
  for (const auto& j : inst.jobs) max_release = std::max(max_release, j.release_slot);
  std::int64_t horizon =
      max_release + (max_total * speed.den + speed.num - 1) / speed.num + 1;

  LpProblem lp;
  // variable = amount of work of job j done on machine i in slot t
  std::vector<std::vector<std::vector<int>>> var(
      n, std::vector<std::vector<int>>(m, std::vector<int>(horizon, -1)));
  for (int j = 0; j < n; ++j) {
    const auto& job = inst.jobs[j];
    for (int i = 0; i < m; ++i) {
      double r = double(job.release_slot) * inst.delta;
      double v = double(job.length_slots[i]) * inst.delta;
      double dij = d_constant(job.costs[i], r, v);
      for (std::int64_t t = job.release_slot; t < horizon; ++t) {
        var[j][i][t] = lp.num_vars++;
        lp.objective.push_back(job.costs[i].value(inst.slot_mid(t)) + dij);
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    LpRow row;
    row.sense = RowSense::GreaterEqual;
    row.rhs = 1.0;
    const auto& job = inst.jobs[j];
    for (int i = 0; i < m; ++i) {
      double v = double(job.length_slots[i]) * inst.delta;
      for (std::int64_t t = job.release_slot; t < horizon; ++t)
        row.coeffs.emplace_back(var[j][i][t], 1.0 / v);
    }
    lp.rows.push_back(std::move(row));
  }
  double cap = speed.as_double() * inst.delta;
  for (int i = 0; i < m; ++i)
    for (std::int64_t t = 0; t < horizon; ++t) {
      LpRow row;
      row.sense = RowSense::LessEqual;
      row.rhs = cap;
      for (int j = 0; j < n; ++j)
        if (var[j][i][t] >= 0) row.coeffs.emplace_back(var[j][i][t], 1.0);
      if (!row.coeffs.empty()) lp.rows.push_back(std::move(row));
    }

  LpResult res = solve_lp(lp);
  if (!res.feasible) throw InfeasibleNetwork("lp_lower_bound: horizon too short");
  return res.value;
}

}  // namespace hgfc
