#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hgfc/experiment.hpp"
#include "hgfc/flow_oracle.hpp"
#include "hgfc/single_machine.hpp"

using namespace hgfc;

namespace {

// The two-job worked example: v1 = 1, v2 = 2, g_j = rho_j * t with
// rho1 = 2, rho2 = 1, common release 0. Its optimum is rho1/2 + 4 rho2 = 5.
Instance two_job_example() {
  Instance inst;
  inst.jobs.push_back({1, 0.0, {1.0}, {CostFunction::scaled_linear(2.0)}});
  inst.jobs.push_back({2, 0.0, {2.0}, {CostFunction::scaled_linear(1.0)}});
  return inst;
}

RemainingState full_state(const Instance& inst) {
  RemainingState state;
  state.time = 0.0;
  for (const auto& j : inst.jobs) state.residuals.emplace_back(j.id, j.lengths[0]);
  return state;
}

Instance random_instance(std::uint64_t seed, int n, std::int64_t max_len, const char* kind,
                         bool zero_release = false) {
  ExperimentConfig config;
  config.n_jobs = n;
  config.seed = seed;
  config.length_hi = max_len;
  config.family.kind = kind;
  config.release_mean_gap = zero_release ? 0.0 : 1.0;
  return gen_instance(config, 0);
}

}  // namespace

TEST_CASE("speed rationalization") {
  Speed s = Speed::from_double(0.5);
  CHECK(s.num == 1);
  CHECK(s.den == 2);
  Speed t = Speed::from_double(1.0 / 3.0);
  CHECK(t.num == 1);
  CHECK(t.den == 3);
  CHECK_THROWS_AS(Speed::from_double(0.123456789), NonIntegralCapacity);
}

TEST_CASE("rnf construction") {
  Instance inst;
  inst.jobs.push_back({1, 0.0, {2.0}, {CostFunction::scaled_linear(1.0)}});
  inst.jobs.push_back({2, 0.0, {3.0}, {CostFunction::scaled_linear(2.0)}});
  inst.jobs.push_back({3, 0.0, {1.0}, {CostFunction::scaled_linear(3.0)}});
  DiscreteInstance dinst = discretize(inst, 1.0);
  FlowNetwork net = build_rnf(dinst, full_state(inst));
  CHECK(net.supplies == std::vector<std::int64_t>{2, 3, 1});
  CHECK(net.num_slots() == 6);

  // single job
  Instance one;
  one.jobs.push_back({1, 0.0, {1.0}, {CostFunction::scaled_linear(1.0)}});
  FlowNetwork n1 = build_rnf(discretize(one, 1.0), full_state(one));
  CHECK(n1.supplies == std::vector<std::int64_t>{1});

  // speed 1/3: job supplies tripled in quanta, slot capacity one quantum
  FlowNetwork slow = build_rnf(dinst, full_state(inst), Speed{1, 3});
  CHECK(slow.supplies == std::vector<std::int64_t>{6, 9, 3});
  CHECK(slow.speed.num == 1);
  std::int64_t total = 0;
  for (auto s : slow.supplies) total += s;
  CHECK(slow.num_slots() * slow.speed.num == total);  // capacity conservation

  std::ostringstream dump;
  net.dump(dump);
  CHECK(dump.str().find("1 0 ") == 0);
}

TEST_CASE("forced single-job assignment uses the midpoint rule") {
  Instance one;
  one.jobs.push_back({1, 0.0, {2.0}, {CostFunction::scaled_linear(1.0)}});
  FlowNetwork net = build_rnf(discretize(one, 1.0), full_state(one));
  FlowSolution sol = solve_min_cost(net);
  CHECK(sol.value == doctest::Approx(0.5 + 1.5));
  CHECK(sol.assignment() == std::vector<int>{0, 0});
}

TEST_CASE("two-job example value and duals") {
  Instance inst = two_job_example();
  for (double delta : {1.0, 0.5, 0.25, 0.125}) {
    DiscreteInstance dinst = discretize(inst, delta);
    FlowNetwork net = build_rnf(dinst, full_state(inst));
    FlowSolution sol = solve_min_cost(net);
    // midpoint sums are exact for linear costs
    CHECK(sol.value == doctest::Approx(5.0).epsilon(1e-12));
    DualPotentials duals = extract_duals(net, sol);
    CHECK(duals.per_unit[0] == doctest::Approx(4.0));  // rho1 + 2 rho2
    CHECK(duals.per_unit[1] == doctest::Approx(3.0));  // 3 rho2
    CHECK(duals.alpha[0] == doctest::Approx(4.0));
    CHECK(duals.alpha[1] == doctest::Approx(6.0));
    CHECK(duals.objective(net) == doctest::Approx(5.0));
  }
}

TEST_CASE("one job: complementary slackness on every assigned slot") {
  Instance one;
  one.jobs.push_back({1, 0.0, {3.0}, {CostFunction::scaled_power(2.0, 2.0)}});
  FlowNetwork net = build_rnf(discretize(one, 1.0), full_state(one));
  FlowSolution sol = solve_min_cost(net);
  DualPotentials duals = extract_duals(net, sol);
  for (std::int64_t t = 0; t < net.num_slots(); ++t)
    CHECK(duals.per_unit[0] ==
          doctest::Approx(duals.beta[t] + net.value_at(0, net.start_slot + t)));
}

TEST_CASE("strong duality on random instances") {
  for (int trial = 0; trial < 25; ++trial) {
    const char* kind = trial % 3 == 0 ? "linear" : (trial % 3 == 1 ? "power" : "log");
    Instance inst = random_instance(900 + trial, 3, 3, kind, true);
    DiscreteInstance dinst = discretize(inst, 1.0);
    FlowNetwork net = build_rnf(dinst, full_state(inst));
    FlowSolution sol = solve_min_cost(net);
    DualPotentials env = extract_duals(net, sol);
    CHECK(env.objective(net) == doctest::Approx(sol.value).epsilon(1e-12));
    DualPotentials mx = maximal_beta(net, sol);
    CHECK(mx.objective(net) == doctest::Approx(sol.value).epsilon(1e-12));
    // feasibility of the maximal duals on every (job, slot) pair
    for (size_t j = 0; j < net.job_ids.size(); ++j)
      for (std::int64_t t = 0; t <= net.num_slots(); ++t) {
        double beta = t < net.num_slots() ? mx.beta[t] : 0.0;
        CHECK(mx.per_unit[j] <= beta + net.value_at(int(j), net.start_slot + t) + 1e-9);
      }
  }
}

TEST_CASE("maximal duals dominate and keep the objective") {
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_instance(1300 + trial, 4, 3, "power", true);
    DiscreteInstance dinst = discretize(inst, 1.0);
    FlowNetwork net = build_rnf(dinst, full_state(inst));
    FlowSolution sol = solve_min_cost(net);
    DualPotentials env = extract_duals(net, sol);
    DualPotentials mx = maximal_beta(net, sol.value);
    double env_sum = 0.0, mx_sum = 0.0;
    for (double b : env.beta) env_sum += b;
    for (double b : mx.beta) mx_sum += b;
    CHECK(mx_sum >= env_sum - 1e-9);
    for (std::int64_t t = 0; t < net.num_slots(); ++t) CHECK(mx.beta[t] >= env.beta[t] - 1e-9);
    CHECK(mx.objective(net) == doctest::Approx(env.objective(net)).epsilon(1e-12));
  }
}

TEST_CASE("optimal flows are integral per edge") {
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_instance(6200 + trial, 4, 3, "power");
    DiscreteInstance dinst = discretize(inst, 1.0);
    FlowNetwork net = build_offline_network(dinst);
    FlowSolution sol = solve_min_cost(net);
    for (const auto& row : sol.flow)
      for (auto f : row) CHECK((f == 0 || f == 1));
  }
}

TEST_CASE("maximal_beta rejects a wrong optimum value") {
  Instance inst = two_job_example();
  FlowNetwork net = build_rnf(discretize(inst, 1.0), full_state(inst));
  CHECK_THROWS_AS(maximal_beta(net, 4.0), NonOptimalInput);
}

TEST_CASE("single job maximal beta matches the closing constraint") {
  Instance one;
  one.jobs.push_back({1, 0.0, {3.0}, {CostFunction::scaled_linear(2.0)}});
  FlowNetwork net = build_rnf(discretize(one, 1.0), full_state(one));
  FlowSolution sol = solve_min_cost(net);
  DualPotentials mx = maximal_beta(net, sol);
  // alpha/v is pinned by the first free slot past the horizon
  CHECK(mx.per_unit[0] == doctest::Approx(net.value_at(0, 3)));
  for (std::int64_t t = 0; t < 3; ++t)
    CHECK(mx.beta[t] == doctest::Approx(mx.per_unit[0] - net.value_at(0, t)));
}

TEST_CASE("single-job maximal beta equals the residual dual curve") {
  // one job with linear cost: beta(t) = rho (makespan - t), the closed-form
  // split dual, sampled at the slot left boundaries
  Instance one;
  one.jobs.push_back({1, 0.0, {3.0}, {CostFunction::scaled_linear(1.0)}});
  FlowNetwork net = build_rnf(discretize(one, 1.0), full_state(one));
  DualPotentials mx = maximal_beta(net, solve_min_cost(net));
  for (std::int64_t t = 0; t < 3; ++t)
    CHECK(mx.beta[t] == doctest::Approx(1.0 * (3.0 - double(t))));
}

TEST_CASE("beta monotone under adding one job") {
  for (int trial = 0; trial < 30; ++trial) {
    Instance inst = random_instance(2100 + trial, 4, 3, trial % 2 ? "power" : "linear", true);
    Instance smaller = inst;
    smaller.jobs.pop_back();
    if (smaller.jobs.empty()) continue;
    DiscreteInstance dinst = discretize(inst, 1.0);
    FlowNetwork before = build_rnf(dinst, full_state(smaller));
    FlowNetwork after = build_rnf(dinst, full_state(inst));
    DualPotentials b0 = maximal_beta(before, solve_min_cost(before));
    DualPotentials b1 = maximal_beta(after, solve_min_cost(after));
    for (std::int64_t t = 0; t < before.num_slots(); ++t)
      CHECK(b1.beta[t] >= b0.beta[t] - 1e-9);
  }
}

TEST_CASE("oracle equals brute force") {
  for (int trial = 0; trial < 30; ++trial) {
    const char* kind = trial % 3 == 0 ? "linear" : (trial % 3 == 1 ? "power" : "log");
    Instance inst = random_instance(3100 + trial, 3, 3, kind);
    DiscreteInstance dinst = discretize(inst, 1.0);
    if (dinst.total_work_slots(0) > 9) continue;
    FlowNetwork net = build_offline_network(dinst);
    double flow_value = solve_min_cost(net).value;
    CHECK(flow_value == doctest::Approx(brute_force_opt(dinst, 9)).epsilon(1e-12));
  }
}

TEST_CASE("brute force respects the work cap") {
  Instance inst = random_instance(77, 6, 4, "linear");
  DiscreteInstance dinst = discretize(inst, 1.0);
  CHECK_THROWS_AS(brute_force_opt(dinst, 5), TooLarge);
}

TEST_CASE("dominating family is scheduled in dominance order") {
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = random_instance(4100 + trial, 4, 3, "power", true);
    DiscreteInstance dinst = discretize(inst, 1.0);
    FlowNetwork net = build_rnf(dinst, full_state(inst));
    FlowSolution sol = solve_min_cost(net);
    auto assign = sol.assignment();
    // density order = dominance order for rho * g cores
    double prev = 1e300;
    for (int j : assign) {
      CHECK(j >= 0);
      double rho = net.costs[j].rho;
      CHECK(rho <= prev + 1e-12);
      prev = rho;
    }
  }
}

TEST_CASE("infeasible horizon reported") {
  Instance one;
  one.jobs.push_back({1, 0.0, {3.0}, {CostFunction::scaled_linear(1.0)}});
  FlowNetwork net = build_rnf(discretize(one, 1.0), full_state(one));
  net.horizon_slot = 2;  // too short
  CHECK_THROWS_AS(solve_min_cost(net), InfeasibleNetwork);
}

TEST_CASE("value function finite differences track the duals") {
  // time sensitivity: beta_t vs (V(v, t+dt) - V(v, t)) / dt along the path
  for (int trial = 0; trial < 6; ++trial) {
    Instance inst = random_instance(5100 + trial, 3, 2, trial % 2 ? "power" : "linear", true);
    double delta = 0.5;
    DiscreteInstance dinst = discretize(inst, delta);
    FlowNetwork net = build_rnf(dinst, full_state(inst));
    FlowSolution sol = solve_min_cost(net);
    DualPotentials duals = extract_duals(net, sol);
    auto assign = sol.assignment();
    double sup_slope = 0.0;
    for (const auto& j : inst.jobs)
      sup_slope = std::max(sup_slope, j.costs[0].deriv(double(net.horizon_slot) * delta));

    std::vector<std::int64_t> residual(net.supplies);
    for (std::int64_t t = 0; t < net.num_slots(); ++t) {
      // V with the current residuals starting at t vs t+1
      auto value_from = [&](std::int64_t start) {
        FlowNetwork sub = net;
        sub.start_slot = net.start_slot + start;
        sub.supplies = residual;
        std::int64_t total = 0;
        for (auto s : residual) total += s;
        sub.horizon_slot = sub.start_slot + total;
        for (auto& e : sub.earliest_slot) e = sub.start_slot;
        return solve_min_cost(sub).value;
      };
      double v_now = value_from(t);
      double v_next = value_from(t + 1);
      double fd = (v_next - v_now) / delta;
      CHECK(std::abs(duals.beta[t] - fd) <= 5 * delta * sup_slope + 1e-9);
      if (assign[t] >= 0) residual[assign[t]]--;
    }
  }
}
