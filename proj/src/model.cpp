#include "hgfc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hgfc {

namespace {

bool is_multiple(double x, double delta) {
  double q = x / delta;
  return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, std::abs(q));
}

std::int64_t to_slots(double x, double delta) { return std::int64_t(std::llround(x / delta)); }

}  // namespace

void Instance::validate() const {
  if (delta <= 0) throw BadConfig("instance: delta must be positive");
  if (machines < 1) throw BadConfig("instance: need at least one machine");
  for (const auto& j : jobs) {
    if (j.release < 0) throw BadConfig("instance: release times must be nonnegative");
    if (int(j.lengths.size()) != machines || int(j.costs.size()) != machines)
      throw BadConfig("instance: lengths and costs need one entry per machine");
    for (double v : j.lengths)
      if (v <= 0) throw BadConfig("instance: job lengths must be positive");
  }
}

DiscreteInstance discretize(const Instance& inst, double delta) {
  inst.validate();
  if (delta <= 0) throw BadConfig("discretize: delta must be positive");
  DiscreteInstance out;
  out.delta = delta;
  out.machines = inst.machines;
  double max_release = 0.0;
  std::vector<double> total_len(inst.machines, 0.0);
  for (const auto& j : inst.jobs) {
    if (!is_multiple(j.release, delta))
      throw NonCommensurate("release time " + std::to_string(j.release) +
                            " is not a multiple of delta");
    DiscreteJob dj;
    dj.id = j.id;
    dj.release_slot = to_slots(j.release, delta);
    for (int i = 0; i < inst.machines; ++i) {
      if (!is_multiple(j.lengths[i], delta))
        throw NonCommensurate("job length " + std::to_string(j.lengths[i]) +
                              " is not a multiple of delta");
      dj.length_slots.push_back(to_slots(j.lengths[i], delta));
      total_len[i] += j.lengths[i];
    }
    dj.costs = j.costs;
    max_release = std::max(max_release, j.release);
    out.jobs.push_back(std::move(dj));
  }
  double span = *std::max_element(total_len.begin(), total_len.end());
  out.horizon = to_slots(max_release, delta) + to_slots(span, delta);
  return out;
}

std::int64_t DiscreteInstance::total_work_slots(int machine) const {
  std::int64_t total = 0;
  for (const auto& j : jobs) total += j.length_slots[machine];
  return total;
}

const DiscreteJob& DiscreteInstance::job_by_id(int id) const {
  for (const auto& j : jobs)
    if (j.id == id) return j;
  throw BadConfig("unknown job id " + std::to_string(id));
}

std::vector<Interval> Schedule::job_intervals(int job_id) const {
  std::vector<Interval> out;
  for (const auto& machine : slots) {
    for (size_t t = 0; t < machine.size(); ++t) {
      if (machine[t] != job_id) continue;
      double begin = double(t) * delta;
      double end = begin + delta;
      if (!out.empty() && std::abs(out.back().end - begin) < 1e-12 * std::max(1.0, begin))
        out.back().end = end;
      else
        out.push_back({begin, end});
    }
  }
  return out;
}

int Schedule::machine_of(int job_id) const {
  for (size_t i = 0; i < slots.size(); ++i)
    for (int job : slots[i])
      if (job == job_id) return int(i);
  return -1;
}

double Schedule::completion_time(int job_id) const {
  double last = -1.0;
  for (const auto& machine : slots)
    for (size_t t = 0; t < machine.size(); ++t)
      if (machine[t] == job_id) last = double(t + 1) * delta;
  return last;
}

namespace {

// Per-job slot counts on each machine; also enforces releases.
std::map<int, std::pair<int, std::int64_t>> count_slots(const Schedule& sched,
                                                        const DiscreteInstance& inst) {
  std::map<int, std::pair<int, std::int64_t>> counts;  // job id -> (machine, slots)
  for (size_t i = 0; i < sched.slots.size(); ++i) {
    for (size_t t = 0; t < sched.slots[i].size(); ++t) {
      int job = sched.slots[i][t];
      if (job < 0) continue;
      const DiscreteJob& dj = inst.job_by_id(job);
      if (std::int64_t(t) < dj.release_slot)
        throw InfeasibleSchedule("job " + std::to_string(job) + " scheduled before release");
      auto it = counts.find(job);
      if (it == counts.end()) {
        counts[job] = {int(i), 1};
      } else {
        if (it->second.first != int(i))
          throw InfeasibleSchedule("job " + std::to_string(job) + " migrates between machines");
        ++it->second.second;
      }
    }
  }
  return counts;
}

}  // namespace

double fractional_cost(const Schedule& sched, const DiscreteInstance& inst) {
  if (int(sched.slots.size()) != inst.machines)
    throw InfeasibleSchedule("schedule machine count mismatch");
  auto counts = count_slots(sched, inst);
  for (const auto& j : inst.jobs) {
    auto it = counts.find(j.id);
    std::int64_t assigned = it == counts.end() ? 0 : it->second.second;
    std::int64_t expected = it == counts.end() ? 0 : j.length_slots[it->second.first];
    if (it != counts.end() && assigned > expected)
      throw InfeasibleSchedule("job " + std::to_string(j.id) + " over-scheduled");
  }
  double total = 0.0;
  for (size_t i = 0; i < sched.slots.size(); ++i)
    for (size_t t = 0; t < sched.slots[i].size(); ++t) {
      int job = sched.slots[i][t];
      if (job < 0) continue;
      total += inst.slot_cost(int(i), inst.job_by_id(job), std::int64_t(t));
    }
  return total;
}

double exact_fractional_cost(const Schedule& sched, const DiscreteInstance& inst) {
  if (int(sched.slots.size()) != inst.machines)
    throw InfeasibleSchedule("schedule machine count mismatch");
  count_slots(sched, inst);
  double total = 0.0;
  for (const auto& job : inst.jobs) {
    int machine = sched.machine_of(job.id);
    if (machine < 0) continue;
    for (const auto& iv : sched.job_intervals(job.id))
      total += job.costs[machine].definite_integral(iv.begin, iv.end);
  }
  return total;
}

double integral_cost(const Schedule& sched, const DiscreteInstance& inst) {
  auto counts = count_slots(sched, inst);
  double total = 0.0;
  for (const auto& j : inst.jobs) {
    auto it = counts.find(j.id);
    if (it == counts.end() || it->second.second < j.length_slots[it->second.first])
      throw IncompleteSchedule("job " + std::to_string(j.id) + " has remaining work");
    int machine = it->second.first;
    double c = sched.completion_time(j.id);
    total += double(j.length_slots[machine]) * inst.delta * j.costs[machine].value(c);
  }
  return total;
}

std::string Instance::to_json() const {
  nlohmann::json j;
  j["delta"] = delta;
  j["machines"] = machines;
  auto arr = nlohmann::json::array();
  for (const auto& job : jobs) {
    nlohmann::json je;
    je["id"] = job.id;
    je["release"] = job.release;
    je["lengths"] = job.lengths;
    auto costs = nlohmann::json::array();
    for (const auto& c : job.costs) costs.push_back(nlohmann::json::parse(c.to_json()));
    je["costs"] = costs;
    arr.push_back(je);
  }
  j["jobs"] = arr;
  return j.dump(2);
}

Instance Instance::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Instance inst;
  inst.delta = j.at("delta").get<double>();
  inst.machines = j.value("machines", 1);
  for (const auto& je : j.at("jobs")) {
    JobSpec job;
    job.id = je.at("id").get<int>();
    job.release = je.at("release").get<double>();
    job.lengths = je.at("lengths").get<std::vector<double>>();
    for (const auto& c : je.at("costs")) job.costs.push_back(CostFunction::from_json(c.dump()));
    inst.jobs.push_back(std::move(job));
  }
  inst.validate();
  return inst;
}

Instance Instance::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open instance file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void Instance::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw BadConfig("cannot write instance file " + path);
  out << to_json() << "\n";
}

}  // namespace hgfc
