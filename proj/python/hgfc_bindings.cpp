#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hgfc/experiment.hpp"
#include "hgfc/flow_oracle.hpp"
#include "hgfc/single_machine.hpp"
#include "hgfc/unrelated.hpp"
#include "hgfc/verify.hpp"

namespace py = pybind11;
using namespace hgfc;

namespace {

Instance parse_instance(const std::string& json) { return Instance::from_json(json); }

RemainingState full_state(const Instance& inst) {
  RemainingState state;
  for (const auto& j : inst.jobs) state.residuals.emplace_back(j.id, j.lengths[0]);
  return state;
}

py::dict run_single(const std::string& instance_json, double delta) {
  Instance inst = parse_instance(instance_json);
  SingleRunResult run = online_single_run(inst, delta);
  py::dict out;
  out["cost"] = run.cost;
  py::list ledger;
  for (const auto& rec : run.ledger) {
    py::dict row;
    row["job"] = rec.job;
    row["r"] = rec.r;
    row["delta_alg"] = rec.delta_alg;
    row["alpha_new"] = rec.alpha_new;
    row["beta_tail_increase"] = rec.beta_tail_increase;
    row["beta_hat_increase"] = rec.beta_hat_increase;
    row["postponement_ok"] = rec.postponement_ok;
    ledger.append(row);
  }
  out["ledger"] = ledger;
  out["dual_violations"] =
      int(check_dual_feasibility(run.duals, discretize(inst, delta)).size());
  return out;
}

py::dict run_unrelated(const std::string& instance_json, double delta) {
  Instance inst = parse_instance(instance_json);
  UnrelatedRunResult run = online_unrelated_run(inst, delta);
  py::dict out;
  out["cost"] = run.cost;
  py::list ledger;
  for (const auto& rec : run.ledger) {
    py::dict row;
    row["job"] = rec.job;
    row["machine"] = rec.machine;
    row["t_star"] = rec.t_star;
    row["alpha_n"] = rec.alpha_n;
    row["delta_alg"] = rec.delta_alg;
    row["theta_audit"] = rec.theta_audit;
    row["beta_increase"] = rec.beta_increase;
    row["K_audit"] = rec.k_audit;
    ledger.append(row);
  }
  out["ledger"] = ledger;
  out["dual_violations"] =
      int(check_dual_feasibility(run.duals, discretize(inst, delta)).size());
  return out;
}

py::dict hdf_with_duals(const std::string& instance_json, double delta) {
  Instance inst = parse_instance(instance_json);
  DiscreteInstance dinst = discretize(inst, delta);
  Schedule sched = hdf_schedule(dinst);
  SplitInstance split = split_instance(sched, dinst);
  ConvertedDuals conv = convert_duals(split_duals(split), dinst);
  py::dict out;
  out["cost"] = fractional_cost(sched, dinst);
  out["subjobs"] = int(split.subjobs.size());
  py::dict heights;
  for (const auto& [job, h] : conv.heights) heights[py::int_(job)] = h;
  out["heights"] = heights;
  out["objective"] = conv.objective;
  out["min_slack"] = converted_min_slack(conv, dinst);
  return out;
}

}  // namespace

PYBIND11_MODULE(_hgfc, m) {
  m.doc() = "Online job scheduling with general cost functions: oracles, online "
            "engines and duality checks";

  py::register_exception<Error>(m, "HgfcError");

  m.def("gen_instance",
        [](const std::string& config_json, int trial) {
          return gen_instance(ExperimentConfig::from_json(config_json), trial).to_json();
        },
        py::arg("config_json"), py::arg("trial") = 0,
        "Deterministic instance JSON from an experiment config JSON");

  m.def("oracle_value",
        [](const std::string& instance_json, double delta, double speed_num, double speed_den) {
          Instance inst = parse_instance(instance_json);
          DiscreteInstance dinst = discretize(inst, delta);
          Speed speed{std::int64_t(speed_num), std::int64_t(speed_den)};
          return solve_min_cost(build_offline_network(dinst, speed)).value;
        },
        py::arg("instance_json"), py::arg("delta"), py::arg("speed_num") = 1,
        py::arg("speed_den") = 1,
        "Offline optimum of the discretized instance at the given rational speed");

  m.def("oracle_duals",
        [](const std::string& instance_json, double delta) {
          Instance inst = parse_instance(instance_json);
          DiscreteInstance dinst = discretize(inst, delta);
          FlowNetwork net = build_rnf(dinst, full_state(inst));
          FlowSolution sol = solve_min_cost(net);
          DualPotentials duals = extract_duals(net, sol);
          py::dict out;
          out["value"] = sol.value;
          out["alpha"] = duals.alpha;
          out["beta"] = duals.beta;
          out["objective"] = duals.objective(net);
          return out;
        },
        py::arg("instance_json"), py::arg("delta"),
        "Identical-release oracle value with costate-style duals");

  m.def("hdf", &hdf_with_duals, py::arg("instance_json"), py::arg("delta"),
        "HDF schedule cost plus the converted dual heights");

  m.def("run_single", &run_single, py::arg("instance_json"), py::arg("delta"),
        "Online single-machine run: cost, per-arrival ledger, dual violations");

  m.def("run_unrelated", &run_unrelated, py::arg("instance_json"), py::arg("delta"),
        "Online unrelated-machines run: cost, per-arrival ledger, dual violations");

  m.def("lp_lower_bound",
        [](const std::string& instance_json, double delta, std::int64_t num, std::int64_t den) {
          Instance inst = parse_instance(instance_json);
          return lp_lower_bound(discretize(inst, delta), Speed{num, den});
        },
        py::arg("instance_json"), py::arg("delta"), py::arg("speed_num") = 1,
        py::arg("speed_den") = 1, "Transportation-LP lower bound at a rational speed");

  m.def("curvature_K",
        [](const std::string& instance_json) {
          Instance inst = parse_instance(instance_json);
          std::vector<CostFunction> costs;
          for (const auto& j : inst.jobs)
            for (const auto& c : j.costs) costs.push_back(c);
          return curvature_K(costs);
        },
        py::arg("instance_json"));

  m.def("stretch_theta",
        [](const std::string& instance_json) {
          Instance inst = parse_instance(instance_json);
          std::vector<CostFunction> costs;
          std::vector<double> lengths;
          double horizon = 1.0;
          for (const auto& j : inst.jobs) {
            for (const auto& c : j.costs) costs.push_back(c);
            for (double v : j.lengths) {
              lengths.push_back(v);
              horizon += v;
            }
          }
          return stretch_theta(costs, lengths, horizon);
        },
        py::arg("instance_json"));

  m.def("hrdf",
        [](const std::string& instance_json, double delta) {
          HrdfResult res = hrdf_run_and_fit(parse_instance(instance_json), delta);
          py::dict out;
          out["beta_hat_integral"] = res.beta_hat_integral;
          out["alpha_sum"] = res.alpha_sum;
          out["flow_cost"] = res.flow_cost;
          out["k"] = res.k;
          return out;
        },
        py::arg("instance_json"), py::arg("delta"),
        "Residual-density run with the dual-fitting identity report");
}
