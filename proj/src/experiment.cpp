#include "hgfc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hgfc/flow_oracle.hpp"
#include "hgfc/single_machine.hpp"
#include "hgfc/unrelated.hpp"
#include "hgfc/verify.hpp"

namespace fs = std::filesystem;

namespace hgfc {

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  return lo + std::int64_t(next() % std::uint64_t(hi - lo + 1));
}

double Rng::uniform_real(double lo, double hi) {
  double u = double(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::int64_t Rng::geometric(double mean) {
  if (mean <= 0) return 0;
  double p = 1.0 / (1.0 + mean);
  double u = uniform_real(0.0, 1.0);
  return std::int64_t(std::floor(std::log1p(-u) / std::log1p(-p)));
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["algorithm"] = algorithm;
  j["benchmark"] = benchmark;
  j["family"] = {{"kind", family.kind},       {"k", family.k},
                 {"rho_range", {family.rho_lo, family.rho_hi}},
                 {"coeff_range", {family.coeff_lo, family.coeff_hi}},
                 {"shifted", family.shifted}};
  j["n_jobs"] = n_jobs;
  j["n_machines"] = n_machines;
  j["delta"] = delta;
  j["epsilon"] = epsilon;
  j["seed"] = seed;
  j["trials"] = trials;
  j["threads"] = threads;
  j["length_range"] = {length_lo, length_hi};
  j["release_mean_gap"] = release_mean_gap;
  if (explicit_instance) j["explicit_instance"] = nlohmann::json::parse(*explicit_instance);
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  c.algorithm = j.value("algorithm", c.algorithm);
  c.benchmark = j.value("benchmark", c.benchmark);
  if (j.contains("family")) {
    const auto& f = j["family"];
    c.family.kind = f.value("kind", c.family.kind);
    c.family.k = f.value("k", c.family.k);
    if (f.contains("rho_range")) {
      c.family.rho_lo = f["rho_range"][0].get<double>();
      c.family.rho_hi = f["rho_range"][1].get<double>();
    }
    if (f.contains("coeff_range")) {
      c.family.coeff_lo = f["coeff_range"][0].get<double>();
      c.family.coeff_hi = f["coeff_range"][1].get<double>();
    }
    c.family.shifted = f.value("shifted", c.family.shifted);
  }
  c.n_jobs = j.value("n_jobs", c.n_jobs);
  c.n_machines = j.value("n_machines", c.n_machines);
  c.delta = j.value("delta", c.delta);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.seed = j.value("seed", c.seed);
  c.trials = j.value("trials", c.trials);
  c.threads = j.value("threads", c.threads);
  if (j.contains("length_range")) {
    c.length_lo = j["length_range"][0].get<std::int64_t>();
    c.length_hi = j["length_range"][1].get<std::int64_t>();
  }
  c.release_mean_gap = j.value("release_mean_gap", c.release_mean_gap);
  if (j.contains("explicit_instance")) c.explicit_instance = j["explicit_instance"].dump();
  if (c.n_jobs < 0 || c.trials < 1 || c.length_lo > c.length_hi || c.length_lo < 1)
    throw BadConfig("experiment config has an empty or invalid range");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

Instance gen_instance(const ExperimentConfig& config, int trial) {
  if (config.explicit_instance) return Instance::from_json(*config.explicit_instance);
  Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + std::uint64_t(trial) + 1);
  Instance inst;
  inst.delta = config.delta;
  inst.machines = config.n_machines;
  std::int64_t slot = 0;
  for (int n = 0; n < config.n_jobs; ++n) {
    if (n > 0) slot += rng.geometric(config.release_mean_gap);
    JobSpec job;
    job.id = n + 1;
    job.release = double(slot) * config.delta;
    for (int i = 0; i < config.n_machines; ++i) {
      double v = double(rng.uniform_int(config.length_lo, config.length_hi)) * config.delta;
      job.lengths.push_back(v);
      double shift = config.family.shifted ? job.release : 0.0;
      const FamilyConfig& f = config.family;
      if (f.kind == "linear") {
        job.costs.push_back(
            CostFunction::scaled_linear(rng.uniform_real(f.rho_lo, f.rho_hi), shift));
      } else if (f.kind == "power") {
        job.costs.push_back(
            CostFunction::scaled_power(rng.uniform_real(f.rho_lo, f.rho_hi), f.k, shift));
      } else if (f.kind == "log") {
        job.costs.push_back(CostFunction::scaled_log(rng.uniform_real(f.rho_lo, f.rho_hi), shift));
      } else if (f.kind == "poly2") {
        double a = rng.uniform_real(f.coeff_lo, f.coeff_hi);
        double b = rng.uniform_real(f.coeff_lo, f.coeff_hi);
        // unscaled quadratic a t^2 + b t divided by the machine length
        job.costs.push_back(CostFunction::polynomial({b / v, a / v}, shift));
      } else {
        throw BadConfig("unknown cost family kind: " + f.kind);
      }
    }
    inst.jobs.push_back(std::move(job));
  }
  inst.validate();
  return inst;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct PlotData {
  std::vector<std::string> alpha_lines;
  std::vector<std::string> beta_lines;
  std::vector<std::string> beta_hat_lines;
};

TrialOutcome run_trial(const ExperimentConfig& config, int trial, PlotData* plots) {
  TrialOutcome out;
  out.trial = trial;
  auto fail = [&](const std::string& msg) {
    out.pass = false;
    out.failures.push_back(msg);
  };
  Instance inst = gen_instance(config, trial);
  nlohmann::json report;
  report["trial"] = trial;
  std::string family = config.family.kind;
  double alg_cost = 0.0, benchmark = 0.0, ratio = 0.0, bound = 0.0, K = 0.0, theta = 0.0;
  bool row_pass = true;
  Speed speed = Speed::from_double(1.0 + config.epsilon);

  if (inst.jobs.empty()) {
    out.summary_row = std::to_string(trial) + "," + family + ",0," +
                      std::to_string(config.n_machines) + ",0,0," + fmt(speed.as_double()) +
                      ",0,0,0,0,1";
    out.report_json = report.dump();
    return out;
  }
  DiscreteInstance dinst = discretize(inst, config.delta);

  if (config.algorithm == "hdf") {
    Schedule sched = hdf_schedule(dinst);
    alg_cost = fractional_cost(sched, dinst);
    double exact_cost = exact_fractional_cost(sched, dinst);
    SplitInstance split = split_instance(sched, dinst);
    AlphaBetaPlots split_plots = split_duals(split);
    if (std::abs(split_plots.dual_objective() - exact_cost) > 1e-9 * (1 + std::abs(exact_cost)))
      fail("split dual objective != HDF cost");
    ConvertedDuals conv = convert_duals(split_plots, dinst);
    if (std::abs(conv.objective - exact_cost) > 1e-9 * (1 + std::abs(exact_cost)))
      fail("converted dual objective != HDF cost");
    double slack = converted_min_slack(conv, dinst);
    if (slack < -1e-9) fail("converted duals infeasible, slack " + fmt(slack));
    if (config.benchmark == "brute") {
      benchmark = brute_force_opt(dinst, 12);
    } else {
      benchmark = slower_benchmark(dinst, speed);
    }
    ratio = benchmark > 0 ? alg_cost / benchmark : 1.0;
    bound = config.epsilon == 0.0 ? 1.0 : 2.0;
    if (config.epsilon == 0.0 && std::abs(ratio - 1.0) > 1e-6)
      fail("HDF is not optimal against the unit-speed oracle");
    row_pass = out.pass;
    std::vector<CostFunction> cfs;
    for (auto& jj : inst.jobs) cfs.push_back(jj.costs[0]);
    K = curvature_K(cfs);
    for (const auto& step : conv.trace) {
      nlohmann::json line;
      line["trial"] = trial;
      line["subjob"] = step.subjob_index;
      line["job"] = step.parent;
      line["old_height"] = step.old_height;
      line["new_height"] = step.new_height;
      out.ledger_lines.push_back(line.dump());
    }
    if (plots) {
      for (size_t k = 0; k < split_plots.steps.size(); ++k) {
        const auto& s = split_plots.steps[k];
        const auto& c = conv.plots.steps[k];
        plots->alpha_lines.push_back(std::to_string(trial) + ",split," + std::to_string(s.parent) +
                                     "," + fmt(s.a) + "," + fmt(s.b) + "," + fmt(s.height));
        plots->alpha_lines.push_back(std::to_string(trial) + ",converted," +
                                     std::to_string(c.parent) + "," + fmt(c.a) + "," + fmt(c.b) +
                                     "," + fmt(c.height));
      }
      for (const auto& p : split_plots.beta) {
        for (double t : {p.a, 0.5 * (p.a + p.b)}) {
          plots->beta_lines.push_back(std::to_string(trial) + "," + fmt(t) + "," +
                                      fmt(split_plots.beta_at(t)) + "," +
                                      fmt(conv.plots.beta_at(t)));
        }
      }
    }
    report["split_subjobs"] = int(split.subjobs.size());
    report["converted_objective"] = conv.objective;
  } else if (config.algorithm == "alg2") {
    SingleRunResult run = online_single_run(inst, config.delta);
    CompetitiveReport rep = competitive_report(run, inst, speed);
    alg_cost = rep.alg_cost;
    benchmark = rep.benchmark_cost;
    ratio = rep.ratio;
    bound = rep.bound;
    K = rep.K;
    for (const auto& rec : run.ledger) {
      if (rec.delta_alg > rec.alpha_new + 1e-9)
        fail("arrival " + std::to_string(rec.job) + ": cost increment exceeds its alpha");
      nlohmann::json line;
      line["trial"] = trial;
      line["job"] = rec.job;
      line["r"] = rec.r;
      line["delta_alg"] = rec.delta_alg;
      line["alpha_new"] = rec.alpha_new;
      line["beta_tail_increase"] = rec.beta_tail_increase;
      line["beta_hat_increase"] = rec.beta_hat_increase;
      line["postponement_ok"] = rec.postponement_ok;
      out.ledger_lines.push_back(line.dump());
    }
    auto violations = check_dual_feasibility(run.duals, dinst);
    if (!violations.empty())
      fail("final duals have " + std::to_string(violations.size()) + " violations");
    if (rep.dual_objective > rep.benchmark_cost + 1e-7 * (1 + std::abs(rep.benchmark_cost)))
      fail("weak duality violated");
    if (!rep.pass && rep.postponement_violations == 0)
      fail("competitive ratio " + fmt(rep.ratio) + " exceeds bound " + fmt(rep.bound));
    row_pass = rep.pass || rep.postponement_violations > 0;
    report = nlohmann::json::parse(rep.to_json());
    report["trial"] = trial;
    if (plots) {
      for (size_t e = 0; e < run.epochs.size(); ++e) {
        const auto& [from, plan] = run.epochs[e];
        double makespan = from;
        for (const auto& ji : plan)
          for (const auto& iv : ji.intervals) makespan = std::max(makespan, iv.end);
        for (double t = from; t <= makespan + 1e-12; t += config.delta)
          plots->beta_hat_lines.push_back(std::to_string(trial) + "," + std::to_string(e) + "," +
                                          fmt(t) + "," + fmt(beta_hat_single(plan, t)));
      }
    }
  } else if (config.algorithm == "alg3") {
    UnrelatedRunResult run = online_unrelated_run(inst, config.delta);
    CompetitiveReport rep = competitive_report(run, inst, speed);
    alg_cost = rep.alg_cost;
    benchmark = rep.benchmark_cost;
    ratio = rep.ratio;
    bound = rep.bound;
    K = rep.K;
    theta = rep.theta;
    double audit_theta = rep.bound / 2.0;
    int tight_theta_excesses = 0;
    for (const auto& rec : run.ledger) {
      if (rec.delta_alg > audit_theta * rec.alpha_n + 1e-9)
        fail("arrival " + std::to_string(rec.job) + ": theta audit failed");
      if (rec.delta_alg > rep.theta * rec.alpha_n + 1e-9) ++tight_theta_excesses;
      if (rec.beta_increase > rep.K * rec.delta_alg + 1e-9)
        fail("arrival " + std::to_string(rec.job) + ": K audit failed");
      nlohmann::json line;
      line["trial"] = trial;
      line["job"] = rec.job;
      line["machine"] = rec.machine;
      line["t_star"] = rec.t_star;
      line["alpha_n"] = rec.alpha_n;
      line["delta_alg"] = rec.delta_alg;
      line["theta_audit"] = rec.theta_audit;
      line["beta_increase"] = rec.beta_increase;
      line["K_audit"] = rec.k_audit;
      out.ledger_lines.push_back(line.dump());
    }
    auto violations = check_dual_feasibility(run.duals, dinst);
    if (!violations.empty())
      fail("final duals have " + std::to_string(violations.size()) + " violations");
    double lp_unit = lp_lower_bound(dinst, Speed::unit());
    double exact_cost = exact_fractional_cost(run.schedule, dinst);
    if (lp_unit > 2.0 * exact_cost + 1e-9)
      fail("LP lower bound exceeds twice the schedule cost");
    if (rep.dual_objective > rep.benchmark_cost + 1e-7 * (1 + std::abs(rep.benchmark_cost)))
      fail("weak duality violated");
    if (!rep.pass) fail("competitive ratio " + fmt(rep.ratio) + " exceeds bound " + fmt(rep.bound));
    row_pass = rep.pass;
    report = nlohmann::json::parse(rep.to_json());
    report["trial"] = trial;
    report["lp_unit_speed"] = lp_unit;
    report["tight_theta_excesses"] = tight_theta_excesses;
  } else if (config.algorithm == "hrdf") {
    HrdfResult res = hrdf_run_and_fit(inst, config.delta);
    alg_cost = res.flow_cost;
    benchmark = res.alpha_sum;
    ratio = res.alpha_sum > 0 ? res.beta_hat_integral / res.alpha_sum : 1.0;
    bound = 1.0;
    if (std::abs(res.beta_hat_integral - res.alpha_sum) > 1e-6 * (1 + std::abs(res.alpha_sum)))
      fail("beta-hat area differs from the alpha-hat sum");
    if (res.k == 1.0 &&
        std::abs(res.beta_hat_integral - res.flow_cost) > 1e-9 * (1 + std::abs(res.flow_cost)))
      fail("k=1 identity with the flow cost failed");
    for (size_t n = 0; n < res.alpha_hat.size(); ++n) {
      nlohmann::json line;
      line["trial"] = trial;
      line["arrival"] = int(n);
      line["alpha_hat"] = res.alpha_hat[n];
      out.ledger_lines.push_back(line.dump());
    }
    if (plots)
      for (const auto& [t, v] : res.curve)
        plots->beta_hat_lines.push_back(std::to_string(trial) + ",0," + fmt(t) + "," + fmt(v));
    report["trial"] = trial;
    report["beta_hat_integral"] = res.beta_hat_integral;
    report["alpha_sum"] = res.alpha_sum;
    report["flow_cost"] = res.flow_cost;
    report["k"] = res.k;
    row_pass = out.pass;
  } else {
    throw BadConfig("unknown algorithm: " + config.algorithm);
  }

  row_pass = row_pass && out.pass;
  std::ostringstream row;
  row << trial << ',' << family << ',' << inst.jobs.size() << ',' << inst.machines << ','
      << fmt(K) << ',' << fmt(theta) << ',' << fmt(speed.as_double()) << ',' << fmt(alg_cost)
      << ',' << fmt(benchmark) << ',' << fmt(ratio) << ',' << fmt(bound) << ','
      << (row_pass ? 1 : 0);
  out.summary_row = row.str();
  if (!report.contains("alg_cost")) {
    report["alg_cost"] = alg_cost;
    report["benchmark_cost"] = benchmark;
    report["ratio"] = ratio;
  }
  report["pass"] = row_pass && out.pass;
  if (!out.failures.empty()) report["failures"] = out.failures;
  out.report_json = report.dump();
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  ExperimentResult result;
  result.trials.resize(config.trials);
  std::vector<PlotData> plot_data(config.trials);

  int threads = std::max(1, std::min(config.threads, config.trials));
  auto worker = [&](int offset) {
    for (int t = offset; t < config.trials; t += threads)
      result.trials[t] = run_trial(config, t, &plot_data[t]);
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& t : result.trials)
    if (!t.pass) ++result.failures;

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "instances");
    for (int t = 0; t < config.trials; ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "trial_%04d.json", t);
      gen_instance(config, t).save((fs::path(out_dir) / "instances" / name).string());
    }
    {
      std::ofstream ledger(fs::path(out_dir) / "ledger.jsonl");
      for (const auto& t : result.trials)
        for (const auto& line : t.ledger_lines) ledger << line << "\n";
    }
    {
      std::ofstream report(fs::path(out_dir) / "report.json");
      report << "{\n  \"config\": " << config.to_json() << ",\n  \"failures\": "
             << result.failures << ",\n  \"trials\": [\n";
      for (size_t i = 0; i < result.trials.size(); ++i)
        report << "    " << result.trials[i].report_json
               << (i + 1 < result.trials.size() ? ",\n" : "\n");
      report << "  ]\n}\n";
    }
    {
      std::ofstream csv(fs::path(out_dir) / "summary.csv");
      csv << "instance_id,family,n,m,K,theta,speed,alg_cost,benchmark,ratio,bound,pass\n";
      for (const auto& t : result.trials) csv << t.summary_row << "\n";
    }
    bool any_alpha = false, any_beta = false, any_hat = false;
    for (const auto& p : plot_data) {
      any_alpha |= !p.alpha_lines.empty();
      any_beta |= !p.beta_lines.empty();
      any_hat |= !p.beta_hat_lines.empty();
    }
    if (any_alpha || any_beta || any_hat) fs::create_directories(fs::path(out_dir) / "plots");
    if (any_alpha) {
      std::ofstream f(fs::path(out_dir) / "plots" / "alpha_plot.csv");
      f << "trial,kind,job,t_start,t_end,height\n";
      for (const auto& p : plot_data)
        for (const auto& l : p.alpha_lines) f << l << "\n";
    }
    if (any_beta) {
      std::ofstream f(fs::path(out_dir) / "plots" / "beta_plot.csv");
      f << "trial,t,beta_split,beta_converted\n";
      for (const auto& p : plot_data)
        for (const auto& l : p.beta_lines) f << l << "\n";
    }
    if (any_hat) {
      std::ofstream f(fs::path(out_dir) / "plots" / "beta_hat.csv");
      f << "trial,epoch,t,beta_hat\n";
      for (const auto& p : plot_data)
        for (const auto& l : p.beta_hat_lines) f << l << "\n";
    }
  }
  return result;
}

int verify_bundle(const std::string& out_dir) {
  std::ifstream in(fs::path(out_dir) / "report.json");
  if (!in) throw BadConfig("no report.json under " + out_dir);
  nlohmann::json j = nlohmann::json::parse(in);
  ExperimentConfig config = ExperimentConfig::from_json(j.at("config").dump());
  // Re-run every trial from its stored instance and compare the summary rows.
  std::ifstream csv(fs::path(out_dir) / "summary.csv");
  if (!csv) throw BadConfig("no summary.csv under " + out_dir);
  std::string header, line;
  std::getline(csv, header);
  std::vector<std::string> rows;
  while (std::getline(csv, line))
    if (!line.empty()) rows.push_back(line);
  // Per-trial cost increments from the ledger: for the online algorithms the
  // summed increments are the algorithm's cost, so every ratio row must be
  // re-derivable from its ledger lines.
  std::map<int, double> ledger_cost;
  {
    std::ifstream ledger(fs::path(out_dir) / "ledger.jsonl");
    std::string row;
    while (std::getline(ledger, row)) {
      if (row.empty()) continue;
      nlohmann::json rec = nlohmann::json::parse(row);
      if (rec.contains("delta_alg"))
        ledger_cost[rec.at("trial").get<int>()] += rec.at("delta_alg").get<double>();
    }
  }
  int mismatches = 0;
  for (int t = 0; t < config.trials; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%04d.json", t);
    ExperimentConfig single = config;
    single.trials = 1;
    single.explicit_instance =
        Instance::load((fs::path(out_dir) / "instances" / name).string()).to_json();
    PlotData scratch;
    TrialOutcome redo = run_trial(single, 0, &scratch);
    std::string expect = rows.at(t).substr(rows.at(t).find(','));
    std::string got = redo.summary_row.substr(redo.summary_row.find(','));
    if (expect != got) {
      ++mismatches;
      std::fprintf(stderr, "trial %d: summary row mismatch\n  stored: %s\n  rerun:  %s\n", t,
                   expect.c_str(), got.c_str());
    }
    if (!redo.pass) ++mismatches;
    if ((config.algorithm == "alg2" || config.algorithm == "alg3") && ledger_cost.count(t)) {
      // summary column 8 is alg_cost
      std::stringstream ss(rows.at(t));
      std::string field;
      for (int c = 0; c <= 7; ++c) std::getline(ss, field, ',');
      double stored = std::stod(field);
      if (std::abs(stored - ledger_cost[t]) > 1e-6 * (1 + std::abs(stored))) {
        ++mismatches;
        std::fprintf(stderr, "trial %d: ledger increments sum to %.12g, summary says %.12g\n", t,
                     ledger_cost[t], stored);
      }
    }
  }
  return mismatches;
}

}  // namespace hgfc
