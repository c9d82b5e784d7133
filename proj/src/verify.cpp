#include "hgfc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace hgfc {

namespace {

constexpr double kFeasTol = 1e-7;

}  // namespace

std::vector<Violation> check_dual_feasibility(const DualSolution& duals,
                                              const DiscreteInstance& inst) {
  std::vector<Violation> out;
  const bool with_d = inst.machines > 1;
  for (const auto& job : inst.jobs) {
    double alpha = duals.alpha.count(job.id) ? duals.alpha.at(job.id) : 0.0;
    for (int i = 0; i < inst.machines; ++i) {
      double v = double(job.length_slots[i]) * inst.delta;
      double lhs = alpha / v;
      double dij =
          with_d ? d_constant(job.costs[i], double(job.release_slot) * inst.delta, v) : 0.0;
      std::int64_t horizon =
          i < int(duals.beta.size()) ? std::int64_t(duals.beta[i].size()) : 0;
      // one slot past the horizon covers all later ones: beta = 0 there and
      // the costs are nondecreasing
      for (std::int64_t t = job.release_slot; t <= horizon; ++t) {
        double rhs = duals.beta_at(i, t) + job.costs[i].value(inst.slot_mid(t)) + dij;
        double slack = rhs - lhs;
        if (slack < -kFeasTol) out.push_back({i, job.id, t, slack});
      }
    }
  }
  return out;
}

double dual_objective_slow(const DualSolution& duals) {
  double alpha = 0.0;
  for (const auto& [id, a] : duals.alpha) alpha += a;
  double beta = 0.0;
  for (const auto& machine : duals.beta)
    for (double b : machine) beta += b;
  return alpha - beta * duals.delta / (1.0 + duals.epsilon);
}

double slower_benchmark(const DiscreteInstance& inst, Speed one_plus_eps) {
  Speed speed = one_plus_eps.reciprocal();
  if (inst.machines == 1) {
    FlowNetwork net = build_offline_network(inst, speed);
    return solve_min_cost(net).value;
  }
  return lp_lower_bound(inst, speed);
}

namespace {

std::vector<CostFunction> all_costs(const Instance& inst) {
  std::vector<CostFunction> out;
  for (const auto& j : inst.jobs)
    for (const auto& c : j.costs) out.push_back(c);
  return out;
}

}  // namespace

double theta_audit_bound(std::span<const CostFunction> functions,
                         std::span<const double> lengths, double horizon) {
  double bound = 0.0;
  for (const auto& g : functions) {
    switch (g.family) {
      case CostFamily::ScaledLinear:
        bound = std::max(bound, 1.0);
        break;
      case CostFamily::ScaledPower:
        if (g.power == 1.0) {
          bound = std::max(bound, 1.0);
        } else if (g.power == 2.0) {
          bound = std::max(bound, 2.0);
        } else {
          std::span<const CostFunction> one(&g, 1);
          bound = std::max(bound, stretch_theta(one, lengths, horizon));
        }
        break;
      case CostFamily::Polynomial:
        if (g.coeffs.size() <= 1) {
          bound = std::max(bound, 1.0);
        } else if (g.coeffs.size() == 2) {
          bound = std::max(bound, 2.0);
        } else {
          std::span<const CostFunction> one(&g, 1);
          bound = std::max(bound, stretch_theta(one, lengths, horizon));
        }
        break;
      default: {
        std::span<const CostFunction> one(&g, 1);
        bound = std::max(bound, stretch_theta(one, lengths, horizon));
        break;
      }
    }
  }
  return bound;
}

CompetitiveReport competitive_report(const SingleRunResult& run, const Instance& inst,
                                     Speed one_plus_eps) {
  CompetitiveReport rep;
  DiscreteInstance dinst = discretize(inst, run.schedule.delta);
  rep.alg_cost = fractional_cost(run.schedule, dinst);
  rep.benchmark_cost = slower_benchmark(dinst, one_plus_eps);
  rep.speed_factor = one_plus_eps.as_double();
  DualSolution slow = run.duals;
  slow.epsilon = rep.speed_factor - 1.0;
  rep.dual_objective = dual_objective_slow(slow);
  auto costs = all_costs(inst);
  rep.K = curvature_K(costs);
  rep.theta = 0.0;
  rep.bound = 2.0;
  rep.ratio = rep.benchmark_cost > 0 ? rep.alg_cost / rep.benchmark_cost : 0.0;
  rep.pass = rep.ratio <= rep.bound * (1.0 + 1e-6);
  rep.benchmark_kind = "oracle";
  rep.arrivals = int(run.ledger.size());
  for (const auto& rec : run.ledger)
    if (!rec.postponement_ok) ++rep.postponement_violations;
  return rep;
}

CompetitiveReport competitive_report(const UnrelatedRunResult& run, const Instance& inst,
                                     Speed one_plus_eps) {
  CompetitiveReport rep;
  DiscreteInstance dinst = discretize(inst, run.schedule.delta);
  // exact interval integral: it equals the sum of the ledger's insertion
  // increments, so the ratio row is re-derivable from the ledger alone
  rep.alg_cost = exact_fractional_cost(run.schedule, dinst);
  rep.benchmark_cost = lp_lower_bound(dinst, one_plus_eps.reciprocal());
  rep.speed_factor = one_plus_eps.as_double();
  DualSolution slow = run.duals;
  slow.epsilon = rep.speed_factor - 1.0;
  rep.dual_objective = dual_objective_slow(slow);
  auto costs = all_costs(inst);
  rep.K = curvature_K(costs);
  std::vector<double> lengths;
  double horizon = 0.0;
  for (const auto& j : inst.jobs) {
    for (double v : j.lengths) {
      lengths.push_back(v);
      horizon += v;
    }
    horizon = std::max(horizon, j.release);
  }
  rep.theta = stretch_theta(costs, lengths, std::max(horizon, 1.0));
  rep.bound = 2.0 * theta_audit_bound(costs, lengths, std::max(horizon, 1.0));
  rep.ratio = rep.benchmark_cost > 0 ? rep.alg_cost / rep.benchmark_cost : 0.0;
  rep.pass = rep.ratio <= rep.bound * (1.0 + 1e-6);
  rep.benchmark_kind = "lp";
  rep.arrivals = int(run.ledger.size());
  return rep;
}

std::string CompetitiveReport::to_json() const {
  nlohmann::json j;
  j["alg_cost"] = alg_cost;
  j["benchmark_cost"] = benchmark_cost;
  j["dual_objective"] = dual_objective;
  j["speed_factor"] = speed_factor;
  j["ratio"] = ratio;
  j["bound"] = bound;
  j["K"] = K;
  j["theta"] = theta;
  j["pass"] = pass;
  j["benchmark"] = benchmark_kind;
  j["arrivals"] = arrivals;
  j["postponement_violations"] = postponement_violations;
  return j.dump(2);
}

namespace {

struct HrdfJob {
  int id;
  double release;
  double weight;  // unscaled w_j
  double k;
  std::int64_t release_slot;
  std::int64_t length_slots;
};

// HRDF forward run from `from` with the given residual slot counts and no
// future arrivals; returns per-job completion times.
std::map<int, double> hrdf_completions(const std::vector<HrdfJob>& jobs,
                                       std::map<int, std::int64_t> residual, std::int64_t from,
                                       double delta) {
  std::map<int, double> completion;
  std::int64_t remaining = 0;
  for (auto& [id, r] : residual) remaining += r;
  std::int64_t t = from;
  while (remaining > 0) {
    int pick = -1;
    double best = -1.0;
    for (const auto& j : jobs) {
      auto it = residual.find(j.id);
      if (it == residual.end() || it->second == 0) continue;
      double density = j.weight / (double(it->second) * delta);
      if (pick < 0 || density > best || (density == best && j.id < pick)) {
        best = density;
        pick = j.id;
      }
    }
    residual[pick]--;
    remaining--;
    ++t;
    if (residual[pick] == 0) completion[pick] = double(t) * delta;
  }
  return completion;
}

}  // namespace

HrdfResult hrdf_run_and_fit(const Instance& inst, double delta) {
  if (!inst.single_machine()) throw BadConfig("hrdf_run_and_fit: single machine only");
  DiscreteInstance dinst = discretize(inst, delta);
  std::vector<HrdfJob> jobs;
  for (const auto& j : dinst.jobs) {
    const CostFunction& c = j.costs[0];
    double k, w;
    double release = double(j.release_slot) * delta;
    double v = double(j.length_slots[0]) * delta;
    if (c.family == CostFamily::ScaledPower) {
      k = c.power;
      w = c.rho * v;  // scaled rho = w / v
    } else if (c.family == CostFamily::ScaledLinear) {
      k = 1.0;
      w = c.rho * v;
    } else {
      throw BadConfig("hrdf_run_and_fit: costs must be w (t - r)^k");
    }
    if (std::abs(c.shift - release) > 1e-9)
      throw BadConfig("hrdf_run_and_fit: cost shift must equal the release time");
    jobs.push_back({j.id, release, w, k, j.release_slot, j.length_slots[0]});
  }
  std::stable_sort(jobs.begin(), jobs.end(), [](const HrdfJob& a, const HrdfJob& b) {
    if (a.release_slot != b.release_slot) return a.release_slot < b.release_slot;
    return a.id < b.id;
  });

  HrdfResult result;
  result.k = jobs.empty() ? 1.0 : jobs.front().k;
  result.schedule.delta = delta;
  result.schedule.slots.assign(1, {});

  auto flow_g = [](const HrdfJob& j, double x) {
    return x <= 0 ? 0.0 : j.weight * std::pow(x, j.k);
  };
  auto flow_gp = [](const HrdfJob& j, double x) {
    return x <= 0 ? 0.0 : j.k * j.weight * std::pow(x, j.k - 1.0);
  };

  std::map<int, std::int64_t> residual;
  std::map<int, double> cur_completion;  // epoch plan, from the latest run
  std::int64_t clock = jobs.empty() ? 0 : jobs.front().release_slot;
  auto& slots = result.schedule.slots[0];

  auto run_epoch_until = [&](std::int64_t until) {
    // execute HRDF slot by slot so preemption points are honored exactly
    while (clock < until) {
      if (std::int64_t(slots.size()) <= clock) slots.resize(clock + 1, -1);
      int pick = -1;
      double best = -1.0;
      for (const auto& j : jobs) {
        auto it = residual.find(j.id);
        if (it == residual.end() || it->second == 0) continue;
        double density = j.weight / (double(it->second) * delta);
        if (pick < 0 || density > best || (density == best && j.id < pick)) {
          best = density;
          pick = j.id;
        }
      }
      if (pick >= 0) {
        slots[clock] = pick;
        residual[pick]--;
      }
      ++clock;
    }
  };

  // integral over [a, b] of the epoch's beta-hat = sum_l [g_l(C_l - a) - g_l(C_l - b)]
  auto epoch_beta_integral = [&](const std::map<int, double>& completions, double a, double b) {
    double total = 0.0;
    for (const auto& j : jobs) {
      auto it = completions.find(j.id);
      if (it == completions.end()) continue;
      total += flow_g(j, it->second - a) - flow_g(j, it->second - b);
    }
    return total;
  };

  double beta_area = 0.0;
  double prev_r = 0.0;
  std::vector<std::pair<double, std::map<int, double>>> epoch_plans;  // (r_n, completions)
  for (size_t n = 0; n < jobs.size(); ++n) {
    const HrdfJob& job = jobs[n];
    double r = job.release * 1.0;
    if (n > 0) {
      beta_area += epoch_beta_integral(cur_completion, prev_r, r);
      run_epoch_until(job.release_slot);
      // drop completed jobs from the epoch view
      for (auto it = cur_completion.begin(); it != cur_completion.end();) {
        if (residual[it->first] == 0)
          it = cur_completion.erase(it);
        else
          ++it;
      }
    }
    clock = std::max(clock, job.release_slot);
    // H_{n-1}: old plan's anchored cost at this boundary
    double old_anchored = 0.0;
    for (const auto& [id, c] : cur_completion)
      for (const auto& jj : jobs)
        if (jj.id == id) old_anchored += flow_g(jj, c - r);
    residual[job.id] = job.length_slots;
    cur_completion = hrdf_completions(jobs, residual, clock, delta);
    double new_anchored = 0.0;
    for (const auto& [id, c] : cur_completion)
      for (const auto& jj : jobs)
        if (jj.id == id) new_anchored += flow_g(jj, c - r);
    result.alpha_hat.push_back(new_anchored - old_anchored);
    epoch_plans.emplace_back(r, cur_completion);
    prev_r = r;
  }
  if (!jobs.empty()) {
    double end = 0.0;
    for (const auto& [id, c] : cur_completion) end = std::max(end, c);
    beta_area += epoch_beta_integral(cur_completion, prev_r, std::max(prev_r, end));
    run_epoch_until(std::int64_t(std::llround(std::max(prev_r, end) / delta)));
  }
  result.beta_hat_integral = beta_area;
  for (double a : result.alpha_hat) result.alpha_sum += a;

  // final completions and true flow cost
  for (const auto& j : jobs) {
    double c = result.schedule.completion_time(j.id);
    result.flow_cost += flow_g(j, c - j.release);
  }
  // curve samples: beta-hat of the governing epoch at every slot boundary
  {
    std::int64_t total_slots = std::int64_t(slots.size());
    for (std::int64_t t = 0; t <= total_slots; ++t) {
      double time = double(t) * delta;
      const std::map<int, double>* plan = nullptr;
      for (const auto& [r, completions] : epoch_plans)
        if (r <= time + 1e-12) plan = &completions;
      double val = 0.0;
      if (plan)
        for (const auto& j : jobs) {
          auto it = plan->find(j.id);
          if (it != plan->end() && it->second > time) val += flow_gp(j, it->second - time);
        }
      result.curve.emplace_back(time, val);
    }
  }
  return result;
}

}  // namespace hgfc
